#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "spectral/errors.hpp"
#include "spectral/km.hpp"

namespace spectral {
namespace zp {

using Complex = std::complex<double>;

// Zero / equality tolerance for everything complex in this namespace.
constexpr double kTau = 1e-9;

// Points and linear forms over Z_p^n are encoded base-p: digit i of the code
// is coordinate i (the variable x_{i+1}); <a,x> = sum a_i x_i mod p.
using Code = std::uint32_t;

int digit(Code v, int i, int p);
Code set_digit(Code v, int i, int p, int d);
int dot(Code a, Code x, int n, int p);
Code add(Code a, Code b, int n, int p);     // digit-wise a + b
Code sub(Code a, Code b, int n, int p);     // digit-wise a - b
Code scale(Code a, int c, int n, int p);    // digit-wise c * a
int inverse_mod(int a, int p);

// +/-1 table over Z_p^n, p an odd prime in [3,13], p^n <= 2^20.
class ZpFunction {
  public:
    ZpFunction(int p, int n, std::vector<std::int8_t> values);

    static ZpFunction constant(int p, int n, int value = 1);

    int p() const { return p_; }
    int n() const { return n_; }
    std::size_t size() const { return values_.size(); }
    int operator()(Code x) const { return values_[x]; }
    const std::vector<std::int8_t>& values() const { return values_; }

    bool operator==(const ZpFunction&) const = default;

  private:
    int p_;
    int n_;
    std::vector<std::int8_t> values_;
};

// Complex spectrum; coefficients of a real function satisfy
// f-hat(a) = conj(f-hat(-a)) and Parseval within kTau.
class ZpSpectrum {
  public:
    ZpSpectrum(int p, int n, std::vector<Complex> coeffs);

    int p() const { return p_; }
    int n() const { return n_; }
    std::size_t size() const { return coeffs_.size(); }
    const Complex& coeff(Code a) const { return coeffs_[a]; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }

    bool conjugate_symmetric() const;
    bool parseval_ok() const;

  private:
    int p_;
    int n_;
    std::vector<Complex> coeffs_;
};

double spectral_norm(const ZpSpectrum& s);
std::int64_t sparsity(const ZpSpectrum& s);  // |coeff| > kTau

// Dimension-wise length-p transforms, O(n p^(n+1)).
ZpSpectrum dft_forward(const ZpFunction& f);
// Throws NotBooleanError unless every reconstructed value is within kTau of
// +/-1 (values are snapped).
ZpFunction dft_inverse(const ZpSpectrum& s);

// Restriction to chi_gamma = omega^lambda. gamma is first scaled so its
// lowest nonzero digit (the pivot) becomes 1; each coset collapses to
// sum_k omega^(lambda k) f-hat(rep + k gamma) at the representative with
// pivot digit 0, and the pivot digit is deleted from the index.
ZpSpectrum restrict_zp(const ZpSpectrum& s, Code gamma, int lambda);

// sum_a f-hat(a) f-hat(beta - a); |result| <= tau * p^n for Boolean f when
// beta != 0.
Complex convolution_check_p(const ZpSpectrum& s, Code beta);

struct TriangleGap {
    double gap;       // |z1| + |z2| - |z1 + z2|
    double angle;     // between z1 and z2
    double bound;     // C(angle) * min(|z1|, |z2|)
};

// Verifies gap >= (1 - cos angle)/2 * min(|z1|,|z2|) - kTau and returns the
// certificate.
TriangleGap triangle_gap(Complex z1, Complex z2);

struct OvercountReport {
    double lhs;  // coset-wise L1 loss of the restriction chi_eta = omega^lambda
    double rhs;  // sum over all gamma of the pairwise losses
};

// Checks 3 * lhs >= rhs - kTau and returns both sides.
OvercountReport overcount_check(const ZpSpectrum& s, Code eta, int lambda);

struct StepReportP {
    Code eta;                        // beta - alpha
    Code alpha;
    Code beta;
    std::vector<double> drops;       // L1 drop per lambda = 0..p-1
    std::vector<ZpSpectrum> restricted;
};

// All p restrictions on chi_{beta-alpha} = omega^lambda with their exact L1
// drops. Verifies: every drop >= c0 |f-hat(beta)|; at least floor(p/3) drops
// >= c0 |f-hat(alpha)|; at least p-1 drops >= c1 |f-hat(alpha)|; with
// c0 = 1/12 and c1 = (1 - cos(pi/p))/6, all within kTau. Throws NormOneError
// on constant input.
StepReportP main_lemma_step_p(const ZpSpectrum& s);

constexpr double kC0 = 1.0 / 12.0;
double c1_of(int p);  // (1 - cos(pi/p)) / 6

// p-ary parity decision tree: internal nodes have p children indexed by
// lambda, branch lambda taken when chi_query(x) = omega^lambda.
class PAryPdt {
  public:
    struct Leaf {
        int label = 0;            // +1/-1
        double constant_re = 0;   // Re f-hat(0) of the leaf function (functional form)
        bool functional = false;
    };
    struct Node {
        Code query = 0;  // nonzero for internal nodes, pivot digit scaled to 1
        std::vector<std::unique_ptr<Node>> children;  // size p when internal
        Leaf leaf;

        bool is_leaf() const { return children.empty(); }
    };

    PAryPdt(int p, int n, std::unique_ptr<Node> root);

    int p() const { return p_; }
    int n() const { return n_; }
    const Node& root() const { return *root_; }
    std::size_t size() const;
    int depth() const;

  private:
    int p_;
    int n_;
    std::unique_ptr<Node> root_;
};

int evaluate_p(const PAryPdt& t, Code x);
ZpFunction evaluate_to_table_p(const PAryPdt& t);

// True if every root-to-leaf path queries forms that are linearly
// independent over Z_p.
bool paths_independent_p(const PAryPdt& t);

// Constraints chi_gamma = omega^lambda in original coordinates.
struct ZpRestriction {
    struct Constraint {
        Code form;
        int lambda;
    };
    std::vector<Constraint> constraints;

    std::size_t co_dimension() const { return constraints.size(); }
};

// Iterate the restriction step, following the best-drop branch, until the
// function is constant; co-dimension <= ceil(A^2 / c0) is checked.
ZpRestriction find_constant_subspace_p(const ZpSpectrum& s);

// Exact p-ary tree; equivalence is the caller's to verify, the recursion
// solution p^(2A^2/c) n^(2A/c) with c = min(c0, c1) is checked per run.
PAryPdt synth_pdt_p(const ZpSpectrum& s);

// Layered sparse synthesizer; depth <= ceil(A^2/c0) * ceil(log2 s) checked.
PAryPdt synth_sparse_p(const ZpSpectrum& s);

// eps-approximation (functional leaves); depth capped at
// K = ceil((20/c0) (A^2 + log2(1/eps_internal))) with eps halved internally.
PAryPdt synth_approx_p(const ZpSpectrum& s, double eps);

// Membership-query interface over Z_p^n.
class ZpOracle {
  public:
    virtual ~ZpOracle() = default;
    int query(Code x) {
        ++queries_;
        return do_query(x);
    }
    std::uint64_t query_count() const { return queries_; }

  protected:
    virtual int do_query(Code x) = 0;

  private:
    std::uint64_t queries_ = 0;
};

class ZpTableOracle : public ZpOracle {
  public:
    explicit ZpTableOracle(ZpFunction f) : f_(std::move(f)) {}

  protected:
    int do_query(Code x) override { return f_(x); }

  private:
    ZpFunction f_;
};

struct SearchHitP {
    Code alpha;
    Complex estimate;
};

struct SearchResultP {
    std::vector<SearchHitP> hits;
    std::uint64_t queries = 0;
    bool exact = false;
};

// p-ary analogue of km_search: prefix buckets over the low digits, weight
// estimator E[f(x1|z) f(x2|z) conj(chi_a(x1)) chi_a(x2)], pruning below
// theta^2 / 2, same exact-scan shortcut rules.
SearchResultP km_search_p(ZpOracle& oracle, int p, int n, const SearchParams& params);

}  // namespace zp
}  // namespace spectral
