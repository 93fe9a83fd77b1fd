#pragma once

#include <cstdint>
#include <string>

namespace spectral {

// Exact dyadic rational num / 2^log2_den. Every Fourier quantity of a Boolean
// function on n <= 24 variables is of this form (coefficients are multiples of
// 2^-n, norms are sums of those), so comparisons below are exact and the
// Z_2 pipeline never touches floating point.
//
// Magnitudes stay small: |value| <= 2^(n/2) for any L1 norm we handle, so the
// numerator fits comfortably in 64 bits; cross products use 128-bit math.
class Dyadic {
  public:
    constexpr Dyadic() = default;
    Dyadic(std::int64_t num, int log2_den);

    static Dyadic from_int(std::int64_t v) { return Dyadic(v, 0); }

    std::int64_t num() const { return num_; }
    int log2_den() const { return log2_den_; }

    bool is_zero() const { return num_ == 0; }
    Dyadic abs() const;
    Dyadic operator-() const { return Dyadic(-num_, log2_den_); }
    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;

    // Exact three-way comparison.
    static int compare(const Dyadic& a, const Dyadic& b);
    bool operator==(const Dyadic& o) const { return compare(*this, o) == 0; }
    bool operator!=(const Dyadic& o) const { return compare(*this, o) != 0; }
    bool operator<(const Dyadic& o) const { return compare(*this, o) < 0; }
    bool operator<=(const Dyadic& o) const { return compare(*this, o) <= 0; }
    bool operator>(const Dyadic& o) const { return compare(*this, o) > 0; }
    bool operator>=(const Dyadic& o) const { return compare(*this, o) >= 0; }

    // this * other >= 1, exactly. Used for the "norm drop >= 1/A" checks
    // without ever forming a non-dyadic quotient.
    static bool product_at_least_one(const Dyadic& a, const Dyadic& b);

    // ceil(value^2) as an integer; the co-dimension budget ceil(A^2).
    std::int64_t ceil_square() const;

    double to_double() const;

    // Lowest terms, e.g. "2", "-1/2", "0".
    std::string to_string() const;

  private:
    std::int64_t num_ = 0;
    int log2_den_ = 0;
};

}  // namespace spectral
