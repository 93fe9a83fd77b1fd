#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spectral/pdt.hpp"

using namespace spectral;

namespace {

BooleanFunction and2() {
    return BooleanFunction(2, {1, 1, 1, -1});
}

double measured_dist(const BooleanFunction& f, const ParityDecisionTree& t) {
    std::size_t mismatches = 0;
    for (std::size_t x = 0; x < f.size(); ++x)
        mismatches += f(static_cast<Mask>(x)) != evaluate(t, static_cast<Mask>(x));
    return static_cast<double>(mismatches) / static_cast<double>(f.size());
}

bool tree_equals_function(const BooleanFunction& f, const ParityDecisionTree& t) {
    return measured_dist(f, t) == 0.0;
}

// The value of a functional leaf's recorded spectrum at the global input x.
int leaf_value_at(const FunctionalPdt::Leaf& leaf, Mask x) {
    Mask local = 0;
    for (std::size_t i = 0; i < leaf.coords.size(); ++i)
        if (x & (Mask(1) << leaf.coords[i])) local |= Mask(1) << i;
    BooleanFunction f =
        wht_inverse(Spectrum(static_cast<int>(leaf.coords.size()), leaf.scaled));
    return f(local);
}

}  // namespace

TEST_CASE("evaluate examples") {
    CHECK(evaluate(ParityDecisionTree::leaf(3, 1), 0b101) == 1);

    // One query on 11 computes chi_11.
    auto root = std::make_unique<ParityDecisionTree::Node>();
    root->query = 0b11;
    root->plus = std::make_unique<ParityDecisionTree::Node>();
    root->plus->label = 1;
    root->minus = std::make_unique<ParityDecisionTree::Node>();
    root->minus->label = -1;
    ParityDecisionTree t(2, std::move(root));
    CHECK(evaluate(t, 0b01) == -1);
    BooleanFunction chi = gen(GenKind::Parity, 2, {.mask = 0b11});
    CHECK(tree_equals_function(chi, t));
}

TEST_CASE("synth_exact on the pinned examples") {
    ParityDecisionTree constant = synth_exact(wht_forward(BooleanFunction::constant(4, -1)));
    CHECK(constant.size() == 1);
    CHECK(evaluate(constant, 0) == -1);

    // AND_2: query e1, the plus side is the constant +1, the minus side asks
    // e2. Size 3, depth 2, under the stated tie-break.
    ParityDecisionTree t = synth_exact(wht_forward(and2()));
    CHECK(t.size() == 3);
    CHECK(t.depth() == 2);
    CHECK(t.root().query == 0b01);
    CHECK(t.root().plus->is_leaf());
    CHECK(t.root().plus->label == 1);
    CHECK(t.root().minus->query == 0b10);
    CHECK(tree_equals_function(and2(), t));
}

TEST_CASE("synth_exact families") {
    for (int n = 2; n <= 10; ++n) {
        BooleanFunction f = gen(GenKind::And, n);
        ParityDecisionTree t = synth_exact(wht_forward(f));
        CHECK(t.size() <= 2 * static_cast<std::size_t>(n) + 1);
        CHECK(tree_equals_function(f, t));
        CHECK(paths_independent(t));
    }
    for (int n = 3; n <= 9; n += 2) {
        BooleanFunction f = gen(GenKind::Majority, n);
        ParityDecisionTree t = synth_exact(wht_forward(f));
        CHECK(tree_equals_function(f, t));
        CHECK(paths_independent(t));
    }
}

TEST_CASE("synth_exact is exhaustively correct for n <= 3") {
    for (int n = 1; n <= 3; ++n) {
        const std::uint64_t total = std::uint64_t(1) << (std::uint64_t(1) << n);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            BooleanFunction f = oracles::function_by_index(n, idx);
            ParityDecisionTree t = synth_exact(wht_forward(f));
            REQUIRE(tree_equals_function(f, t));
            REQUIRE(paths_independent(t));
        }
    }
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        BooleanFunction f = oracles::random_function(6, rng);
        ParityDecisionTree t = synth_exact(wht_forward(f));
        REQUIRE(tree_equals_function(f, t));
        REQUIRE(paths_independent(t));
    }
}

TEST_CASE("synth_sparse_depth examples") {
    // A character takes one query.
    ParityDecisionTree chi = synth_sparse_depth(wht_forward(gen(GenKind::Parity, 4, {.mask = 0b1010})));
    CHECK(chi.depth() == 1);
    CHECK(tree_equals_function(gen(GenKind::Parity, 4, {.mask = 0b1010}), chi));

    ParityDecisionTree t = synth_sparse_depth(wht_forward(and2()));
    CHECK(t.depth() <= 8);  // ceil(A^2) ceil(log2 s) = 4 * 2
    CHECK(tree_equals_function(and2(), t));

    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        BooleanFunction f = gen(GenKind::SubspaceIndicator, 6, {.k = 3}, seed);
        Spectrum s = wht_forward(f);
        ParityDecisionTree tree = synth_sparse_depth(s);
        std::int64_t log_s = static_cast<std::int64_t>(std::ceil(std::log2(sparsity(s))));
        CHECK(tree.depth() <= spectral_norm(s).ceil_square() * log_s);
        CHECK(tree_equals_function(f, tree));
        CHECK(paths_independent(tree));
    }
}

TEST_CASE("synth_sparse_depth is exhaustively correct for n <= 3") {
    for (int n = 1; n <= 3; ++n) {
        const std::uint64_t total = std::uint64_t(1) << (std::uint64_t(1) << n);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            BooleanFunction f = oracles::function_by_index(n, idx);
            ParityDecisionTree t = synth_sparse_depth(wht_forward(f));
            REQUIRE(tree_equals_function(f, t));
            REQUIRE(paths_independent(t));
        }
    }
}

TEST_CASE("synth_approx meets the requested distance") {
    // Constant: a single functional leaf at distance zero.
    FunctionalPdt ft = synth_approx(wht_forward(BooleanFunction::constant(3)), 0.1);
    CHECK(ft.size() == 1);
    CHECK(measured_dist(BooleanFunction::constant(3), round_to_pdt(ft)) == 0.0);

    struct Case {
        BooleanFunction f;
        double eps;
    };
    const Case cases[] = {
        {gen(GenKind::And, 6), 0.05},
        {gen(GenKind::Majority, 5), 0.1},
    };
    for (const Case& c : cases) {
        Spectrum s = wht_forward(c.f);
        FunctionalPdt tree = synth_approx(s, c.eps);
        const double a = spectral_norm(s).to_double();
        const double cap =
            std::ceil(std::max(10.0 * a * a, 2.0 * std::log2(2.0 / c.eps)));
        CHECK(tree.depth() <= static_cast<int>(cap));
        CHECK(measured_dist(c.f, round_to_pdt(tree)) <= c.eps);
        // Rounding keeps every internal node, so this covers the functional
        // tree's path-independence invariant too.
        CHECK(paths_independent(round_to_pdt(tree)));
    }

    CHECK_THROWS_AS(synth_approx(wht_forward(and2()), 0.0), ParamError);
    CHECK_THROWS_AS(synth_approx(wht_forward(and2()), 0.5), ParamError);
}

TEST_CASE("synth_approx leaves record the true restrictions") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        BooleanFunction f = oracles::random_function(5, rng);
        FunctionalPdt ft = synth_approx(wht_forward(f), 0.1);
        for (std::size_t x = 0; x < f.size(); ++x) {
            const auto& leaf = ft.leaf_for(static_cast<Mask>(x));
            REQUIRE(leaf_value_at(leaf, static_cast<Mask>(x)) == f(static_cast<Mask>(x)));
        }
    }
}

TEST_CASE("synth_approx unbiased-leaf mass stays below eps") {
    std::mt19937_64 rng(43);
    // Inputs reaching a leaf with bias <= 1 - 2*eps_internal make up at most
    // an eps_internal fraction.
    for (int trial = 0; trial < 20; ++trial) {
        BooleanFunction f = oracles::random_function(6, rng);
        const double eps = 0.2;
        const double eps_int = eps / 2;
        FunctionalPdt ft = synth_approx(wht_forward(f), eps);
        std::size_t unbiased = 0;
        for (std::size_t x = 0; x < f.size(); ++x) {
            const auto& leaf = ft.leaf_for(static_cast<Mask>(x));
            unbiased += leaf.bias().to_double() <= 1.0 - 2 * eps_int;
        }
        REQUIRE(static_cast<double>(unbiased) / static_cast<double>(f.size()) <= eps_int);
    }
}

TEST_CASE("round_to_pdt sign handling") {
    auto leaf_with_bias = [](Dyadic constant) {
        auto node = std::make_unique<FunctionalPdt::Node>();
        node->leaf = std::make_unique<FunctionalPdt::Leaf>();
        node->leaf->constant = constant;
        return FunctionalPdt(1, std::move(node));
    };
    CHECK(evaluate(round_to_pdt(leaf_with_bias(Dyadic(9, 4))), 0) == 1);    // 9/16
    CHECK(evaluate(round_to_pdt(leaf_with_bias(Dyadic(-1, 2))), 0) == -1);  // -1/4
    CHECK(evaluate(round_to_pdt(leaf_with_bias(Dyadic(0, 0))), 0) == 1);    // tie -> +1
}

TEST_CASE("check_simple_facts") {
    // One-query parity tree: m = 2, k = 1, spar = 1 <= 4, norm = 1 <= 2.
    ParityDecisionTree chi = synth_exact(wht_forward(gen(GenKind::Parity, 2, {.mask = 0b11})));
    SimpleFactsReport r = check_simple_facts(chi);
    CHECK(r.size == 2);
    CHECK(r.depth == 1);
    CHECK(r.spar == 1);
    CHECK(r.norm == Dyadic::from_int(1));

    // AND_2 exact tree: m = 3, k = 2, spar = 4 <= 12, norm = 2 <= 3.
    r = check_simple_facts(synth_exact(wht_forward(and2())));
    CHECK(r.size == 3);
    CHECK(r.depth == 2);
    CHECK(r.spar == 4);
    CHECK(r.norm == Dyadic::from_int(2));

    // Random trees keep both bounds.
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 1000; ++trial) {
        ParityDecisionTree t = random_pdt(8, 8, rng);
        SimpleFactsReport rr = check_simple_facts(t);
        REQUIRE(rr.spar_bound_ok);
        REQUIRE(rr.norm_bound_ok);
    }
}

TEST_CASE("random_pdt respects its parameters") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        ParityDecisionTree t = random_pdt(6, 10, rng);
        CHECK(t.size() == 10);
        CHECK(paths_independent(t));
    }
    CHECK_THROWS_AS(random_pdt(3, 9, rng), ParamError);
}
