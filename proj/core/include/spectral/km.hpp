#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "spectral/boolfn.hpp"
#include "spectral/pdt.hpp"

namespace spectral {

// Membership-query interface. Implementations must be deterministic for a
// fixed underlying function; the counter increments exactly once per query.
class QueryOracle {
  public:
    virtual ~QueryOracle() = default;

    int query(Mask x) {
        if (budget_ && queries_ >= *budget_)
            throw BudgetExhaustedError("query budget exhausted");
        ++queries_;
        return do_query(x);
    }

    std::uint64_t query_count() const { return queries_; }
    void set_budget(std::uint64_t budget) { budget_ = budget; }

  protected:
    virtual int do_query(Mask x) = 0;

  private:
    std::uint64_t queries_ = 0;
    std::optional<std::uint64_t> budget_;
};

// Oracle backed by a dense truth table.
class TableOracle : public QueryOracle {
  public:
    explicit TableOracle(BooleanFunction f) : f_(std::move(f)) {}
    int n() const { return f_.n(); }

  protected:
    int do_query(Mask x) override { return f_(x); }

  private:
    BooleanFunction f_;
};

// View of a base oracle restricted to an affine subspace, exposed on quotient
// coordinates. Constraints are kept triangular: each new form, lifted to the
// base coordinates, has no support on earlier pivots, so a quotient point is
// completed by solving the pivots in reverse insertion order. The quotient
// coordinate map matches restrict_spectrum's pivot-deletion rule exactly.
class RestrictedOracle : public QueryOracle {
  public:
    // base must outlive this object.
    RestrictedOracle(QueryOracle& base, int base_n);

    // Add the constraint chi_gamma = b, gamma in *current* quotient
    // coordinates; the quotient loses gamma's lowest set bit.
    void restrict(Mask gamma, int b);

    int n() const { return static_cast<int>(coords_.size()); }

    // Original-coordinate mask of a quotient-coordinate form.
    Mask lift_form(Mask gamma) const;

    // The base-coordinate point a quotient point is completed to.
    Mask lift_point(Mask x) const;

  protected:
    int do_query(Mask x) override;

  private:
    struct Constraint {
        Mask form;    // base coordinates; zero on pivots of earlier constraints
        int pivot;    // base coordinate solved by this constraint
        int target;   // <form, x> must equal this mod 2 (0 for b=+1, 1 for b=-1)
    };

    QueryOracle* base_;
    std::vector<int> coords_;  // quotient variable i = base variable coords_[i]
    std::vector<Constraint> constraints_;
};

struct SearchParams {
    double theta;         // report all coefficients with |f-hat| >= theta
    double eta;           // additive estimate accuracy, 0 < eta <= theta/2
    double delta;         // failure probability
    std::uint64_t seed = 0;
    // When false (default) the search may switch to an exact full scan of the
    // oracle once the Hoeffding sample counts exceed the domain size; the
    // guarantee then holds with probability 1 and the query count stays below
    // the sampling cost. Set true to force the sampling path (the soundness
    // suites do).
    bool force_sampling = false;
};

// Empirical mean of f(x) chi_alpha(x) over m = ceil((2/eta^2) ln(2/delta))
// uniform samples; within eta of f-hat(alpha) with probability >= 1-delta.
struct CoeffEstimate {
    std::int64_t sum = 0;      // sum of +/-1 sample products
    std::int64_t samples = 0;  // m

    double value() const { return samples ? double(sum) / double(samples) : 0.0; }
};

CoeffEstimate estimate_coeff(QueryOracle& oracle, int n, Mask alpha, double eta,
                             double delta, std::uint64_t seed);

// Pairwise estimator for the bucket weight W(prefix) = sum over suffixes b of
// f-hat(prefix.b)^2, where the prefix occupies the low `len` bits: empirical
// mean of f(x1|z) f(x2|z) chi_prefix(x1 ^ x2). Unbiased; exposed for the
// search and its validation suites.
double estimate_bucket_weight(QueryOracle& oracle, int n, Mask prefix, int len,
                              std::int64_t samples, std::uint64_t seed);

struct SearchHit {
    Mask alpha;
    double estimate;
};

struct SearchResult {
    std::vector<SearchHit> hits;   // every surviving full-length prefix
    std::uint64_t queries = 0;     // oracle queries consumed by this call
    bool exact = false;            // full-scan shortcut engaged
};

// Goldreich-Levin / Kushilevitz-Mansour style recursive prefix search.
// Bucket weight W(a) = sum over suffixes b of f-hat(a.b)^2 is estimated by
// the pairwise sample mean of f(x1|z) f(x2|z) chi_a(x1 ^ x2); buckets whose
// estimate falls below theta^2 / 2 are pruned. With probability >= 1-delta
// the hits contain every alpha with |f-hat(alpha)| >= theta and each reported
// estimate is within eta. Hits are sorted by mask.
SearchResult km_search(QueryOracle& oracle, int n, const SearchParams& params);

struct LearnResult {
    ParityDecisionTree tree;
    std::uint64_t queries = 0;
    std::uint64_t nodes = 0;  // internal + leaf count, for the report
};

struct LearnOptions {
    double theta = 0;  // 0: derive eps / (2 a_bound)
    double eta = 0;    // 0: derive eps / (4 a_bound)
};

// Query-driven synthesis: the approx recursion driven by km_search
// (theta = eps/2A, eta = eps/4A, per-call budget delta / (2 * node bound))
// on restriction-wrapped oracles. The caller promises a_bound >= ||f-hat||_1;
// the algorithm cannot verify it. Output distance to f is <= eps with
// probability >= 1-delta.
LearnResult learn_approx_pdt(QueryOracle& oracle, int n, double a_bound, double eps,
                             double delta, std::uint64_t seed, const LearnOptions& options = {});

}  // namespace spectral
