#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "spectral/io.hpp"

using namespace spectral;

TEST_CASE("truth table format round-trips bit-exactly") {
    BooleanFunction f = gen(GenKind::And, 2);
    std::string text = io::write_boolfn(f);
    CHECK(text == "BF p=2 n=2\n+1 +1 +1 -1\n");
    std::istringstream in(text);
    CHECK(io::read_boolfn(in) == f);

    std::mt19937_64 rng(3);
    for (int n : {1, 4, 9}) {
        BooleanFunction g = oracles::random_function(n, rng);
        std::string t = io::write_boolfn(g);
        std::istringstream is(t);
        BooleanFunction parsed = io::read_boolfn(is);
        CHECK(parsed == g);
        CHECK(io::write_boolfn(parsed) == t);
    }
}

TEST_CASE("zp truth table format") {
    zp::ZpFunction f(3, 1, {1, -1, -1});
    std::string text = io::write_zpfn(f);
    CHECK(text == "BF p=3 n=1\n+1 -1 -1\n");
    std::istringstream in(text);
    CHECK(io::read_zpfn(in) == f);
}

TEST_CASE("spectrum dump lists nonzero entries ascending") {
    Spectrum s = wht_forward(gen(GenKind::And, 2));
    std::string text = io::write_spectrum(s);
    CHECK(text == "SPEC p=2 n=2\n00 2\n01 2\n10 2\n11 -2\n");
    std::istringstream in(text);
    CHECK(io::read_spectrum(in) == s);

    Spectrum chi = wht_forward(gen(GenKind::Parity, 3, {.mask = 0b101}));
    std::string chi_text = io::write_spectrum(chi);
    CHECK(chi_text == "SPEC p=2 n=3\n101 8\n");
    std::istringstream chi_in(chi_text);
    CHECK(io::read_spectrum(chi_in) == chi);
}

TEST_CASE("parse errors carry line numbers") {
    std::istringstream bad_header("BF q=2 n=2\n+1 +1 +1 -1\n");
    CHECK_THROWS_AS(io::read_function(bad_header), ParseError);
    std::istringstream bad_token("BF p=2 n=1\n+1 zero\n");
    try {
        io::read_function(bad_token);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
    }
    std::istringstream truncated("BF p=2 n=2\n+1 +1\n");
    CHECK_THROWS_AS(io::read_function(truncated), ParseError);
}

TEST_CASE("plain tree format round-trips") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        ParityDecisionTree t = random_pdt(5, 6, rng);
        std::string text = io::write_pdt(t);
        std::istringstream in(text);
        io::AnyTree any = io::read_tree(in);
        REQUIRE(any.pdt.has_value());
        CHECK(*any.pdt == t);
        CHECK(io::write_pdt(*any.pdt) == text);
    }
}

TEST_CASE("functional tree format keeps exact biases") {
    BooleanFunction f = gen(GenKind::Majority, 5);
    FunctionalPdt ft = synth_approx(wht_forward(f), 0.2);
    std::string text = io::write_functional_pdt(ft);
    std::istringstream in(text);
    io::AnyTree any = io::read_tree(in);
    REQUIRE(any.fpdt.has_value());
    CHECK(io::write_functional_pdt(*any.fpdt) == text);
    // Rounding the parsed tree gives the same Boolean tree as rounding the
    // original (the biases survived the text round-trip exactly).
    CHECK(round_to_pdt(*any.fpdt) == round_to_pdt(ft));
}

TEST_CASE("p-ary tree format round-trips") {
    zp::ZpFunction f(3, 1, {1, -1, -1});
    zp::PAryPdt t = zp::synth_pdt_p(zp::dft_forward(f));
    std::string text = io::write_pary_pdt(t);
    CHECK(text == "PDT p=3 n=1\nN 1\nL +1\nL -1\nL -1\n");
    std::istringstream in(text);
    io::AnyTree any = io::read_tree(in);
    REQUIRE(any.pary.has_value());
    CHECK(io::write_pary_pdt(*any.pary) == text);
}

TEST_CASE("malformed trees are rejected with line numbers") {
    // Truncated: the node promises two children, only one leaf follows.
    std::istringstream truncated("PDT p=2 n=2\nN 01\nL +1\n");
    CHECK_THROWS_AS(io::read_tree(truncated), ParseError);

    std::istringstream zero_query("PDT p=2 n=2\nN 00\nL +1\nL -1\n");
    CHECK_THROWS_AS(io::read_tree(zero_query), ParseError);

    std::istringstream bad_bias("PDT p=2 n=1\nF 1/3\n");
    try {
        io::read_tree(bad_bias);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);  // 1/3 is not dyadic
    }

    // p-ary nodes need p children.
    std::istringstream missing_child("PDT p=3 n=1\nN 1\nL +1\nL -1\n");
    CHECK_THROWS_AS(io::read_tree(missing_child), ParseError);
}

TEST_CASE("restriction format") {
    AffineRestriction r;
    r.push(0b0110, 1);
    r.push(0b0001, -1);
    std::string text = io::write_restriction(r, 4);
    CHECK(text == "0110 +1\n0001 -1\n");
    std::istringstream in(text);
    AffineRestriction parsed = io::read_restriction(in, 4);
    CHECK(parsed == r);
}
