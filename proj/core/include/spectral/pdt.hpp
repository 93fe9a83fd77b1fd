#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "spectral/boolfn.hpp"
#include "spectral/restriction.hpp"

namespace spectral {

// Parity decision tree: internal nodes query a nonzero linear form, the plus
// child is taken when chi_query(x) = +1 (<query,x> = 0), the minus child when
// chi_query(x) = -1. Size counts leaves.
class ParityDecisionTree {
  public:
    struct Node {
        Mask query = 0;  // 0 marks a leaf
        int label = 0;   // +1/-1 for leaves
        std::unique_ptr<Node> plus;
        std::unique_ptr<Node> minus;

        bool is_leaf() const { return query == 0; }
    };

    ParityDecisionTree(int n, std::unique_ptr<Node> root);

    static ParityDecisionTree leaf(int n, int label);

    int n() const { return n_; }
    const Node& root() const { return *root_; }
    std::size_t size() const;   // number of leaves
    int depth() const;          // longest root-to-leaf path

    bool operator==(const ParityDecisionTree& o) const;

  private:
    int n_;
    std::unique_ptr<Node> root_;
};

int evaluate(const ParityDecisionTree& t, Mask x);

// Parity tree with leaves carrying the restricted function: the spectrum in
// its local (quotient) coordinates, the map from local to original variable
// positions, and the signed constant coefficient. bias() is |constant|.
class FunctionalPdt {
  public:
    struct Leaf {
        Dyadic constant;                  // f-hat(0) of the leaf function, signed
        std::vector<std::int64_t> scaled; // local spectrum (may be empty after parsing)
        std::vector<int> coords;          // local variable i = original variable coords[i]

        Dyadic bias() const { return constant.abs(); }
    };
    struct Node {
        Mask query = 0;
        std::unique_ptr<Node> plus;
        std::unique_ptr<Node> minus;
        std::unique_ptr<Leaf> leaf;  // set iff query == 0

        bool is_leaf() const { return query == 0; }
    };

    FunctionalPdt(int n, std::unique_ptr<Node> root);

    int n() const { return n_; }
    const Node& root() const { return *root_; }
    std::size_t size() const;
    int depth() const;

    // The leaf an input lands on.
    const Leaf& leaf_for(Mask x) const;

  private:
    int n_;
    std::unique_ptr<Node> root_;
};

// Exact synthesizer: queries alpha ^ beta of the two largest coefficients
// until the restriction is +/- a character, which costs at most one more
// query. Output computes f exactly; size <= 2^(A^2) n^(2A) is checked.
ParityDecisionTree synth_exact(const Spectrum& s);

// Depth-driven synthesizer for sparse functions: queries the whole constraint
// set of find_constant_subspace on every path (with early leaf exit), halving
// the sparsity per round; depth <= ceil(A^2) * ceil(log2 s) is checked.
ParityDecisionTree synth_sparse_depth(const Spectrum& s);

// eps-approximation as a functional tree. The requested eps is halved
// internally so that rounding the leaves costs at most the advertised total:
// dist(f, round_to_pdt(result)) <= eps. Depth is capped at
// K = ceil(max{10 A^2, 2 log2(1/eps_internal)}).
FunctionalPdt synth_approx(const Spectrum& s, double eps);

// Replace every leaf by the sign of its constant coefficient (ties to +1).
ParityDecisionTree round_to_pdt(const FunctionalPdt& ft);

struct SimpleFactsReport {
    std::int64_t size = 0;          // m
    int depth = 0;                  // k
    std::int64_t spar = 0;          // sparsity of the computed function
    Dyadic norm;                    // its spectral norm
    bool spar_bound_ok = false;     // spar <= m 2^k
    bool norm_bound_ok = false;     // norm <= m
};

// Evaluates the tree into a truth table (n <= 16), transforms it and checks
// spar(f) <= m 2^k and ||f-hat||_1 <= m. Throws CheckError if either fails.
SimpleFactsReport check_simple_facts(const ParityDecisionTree& t);

// Uniformly labeled random tree with `leaves` leaves; every path keeps its
// queries linearly independent. Used by gen(RandomPdt) and the property
// suites.
ParityDecisionTree random_pdt(int n, std::int64_t leaves, std::mt19937_64& rng);

// Truth table of the function the tree computes.
BooleanFunction evaluate_to_table(const ParityDecisionTree& t);

// True if every root-to-leaf path queries linearly independent forms.
bool paths_independent(const ParityDecisionTree& t);

}  // namespace spectral
