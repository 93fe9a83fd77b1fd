#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spectral/dyadic.hpp"
#include "spectral/errors.hpp"

namespace spectral {

// Index convention used everywhere: bit i of an input bitmask x is the
// variable x_{i+1}, and <alpha,x> = popcount(alpha & x) mod 2.
using Mask = std::uint32_t;

constexpr int kMaxVars = 24;

inline int parity(Mask a, Mask x) {
    return __builtin_parity(a & x);
}

// Dense +/-1 truth table over Z_2^n, indexed by the input bitmask.
class BooleanFunction {
  public:
    BooleanFunction(int n, std::vector<std::int8_t> values);

    // Constant +1 function.
    static BooleanFunction constant(int n, int value = 1);

    int n() const { return n_; }
    std::size_t size() const { return values_.size(); }
    int operator()(Mask x) const { return values_[x]; }
    const std::vector<std::int8_t>& values() const { return values_; }

    bool operator==(const BooleanFunction& o) const {
        return n_ == o.n_ && values_ == o.values_;
    }

  private:
    int n_;
    std::vector<std::int8_t> values_;
};

// Exact spectrum: the true coefficient is scaled[alpha] / 2^n.
class Spectrum {
  public:
    Spectrum(int n, std::vector<std::int64_t> scaled);

    int n() const { return n_; }
    std::size_t size() const { return scaled_.size(); }
    std::int64_t scaled(Mask alpha) const { return scaled_[alpha]; }
    const std::vector<std::int64_t>& scaled() const { return scaled_; }

    // Coefficient as an exact dyadic rational.
    Dyadic coeff(Mask alpha) const { return Dyadic(scaled_[alpha], n_); }

    // Parseval check: sum of squared scaled coefficients equals 4^n.
    // True exactly when the spectrum comes from a +/-1 table.
    bool parseval_ok() const;

    bool operator==(const Spectrum& o) const { return n_ == o.n_ && scaled_ == o.scaled_; }

  private:
    int n_;
    std::vector<std::int64_t> scaled_;
};

// In-place integer Walsh-Hadamard butterfly, O(n 2^n).
Spectrum wht_forward(const BooleanFunction& f);

// Exact inverse; throws NotBooleanError if the reconstructed table is not
// +/-1 valued.
BooleanFunction wht_inverse(const Spectrum& s);

// ||f-hat||_1 = sum |scaled| / 2^n, exact.
Dyadic spectral_norm(const Spectrum& s);

// Number of nonzero coefficients.
std::int64_t sparsity(const Spectrum& s);

struct TopTwo {
    Mask alpha;  // largest coefficient in absolute value
    Mask beta;   // second largest
};

// Ties broken by (|scaled| descending, bitmask ascending). Throws
// TooSparseError when fewer than two coefficients are nonzero.
TopTwo top_two(const Spectrum& s);

// sum_gamma scaled[gamma] * scaled[delta ^ gamma]; zero for every delta != 0
// when the spectrum comes from a Boolean function (f^2 = 1 in disguise).
std::int64_t convolution_check(const Spectrum& s, Mask delta);

enum class GenKind {
    And,
    Or,
    Majority,
    Parity,
    SubspaceIndicator,
    RandomPdt,
    Random,
};

struct GenParams {
    Mask mask = 0;       // Parity
    int k = 0;           // SubspaceIndicator co-dimension
    std::int64_t m = 0;  // RandomPdt leaf count
};

// Deterministic for a fixed seed. Majority requires odd n; SubspaceIndicator
// requires 0 <= k <= n. The subspace indicator is the +/-1 version
// 1 - 2*ind_V of a random affine subspace of co-dimension k.
BooleanFunction gen(GenKind kind, int n, const GenParams& params = {}, std::uint64_t seed = 0);

}  // namespace spectral
