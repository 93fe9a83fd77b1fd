#include "spectral/dyadic.hpp"

#include <cmath>

#include "spectral/errors.hpp"

namespace spectral {

Dyadic::Dyadic(std::int64_t num, int log2_den) : num_(num), log2_den_(log2_den) {
    check(log2_den >= 0 && log2_den < 63, "dyadic denominator exponent out of range");
    while (log2_den_ > 0 && (num_ & 1) == 0) {
        num_ >>= 1;
        --log2_den_;
    }
    if (num_ == 0) log2_den_ = 0;
}

Dyadic Dyadic::abs() const {
    return Dyadic(num_ < 0 ? -num_ : num_, log2_den_);
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    int k = log2_den_ > o.log2_den_ ? log2_den_ : o.log2_den_;
    std::int64_t a = num_ << (k - log2_den_);
    std::int64_t b = o.num_ << (k - o.log2_den_);
    return Dyadic(a + b, k);
}

Dyadic Dyadic::operator-(const Dyadic& o) const {
    return *this + (-o);
}

int Dyadic::compare(const Dyadic& a, const Dyadic& b) {
    __int128 lhs = static_cast<__int128>(a.num_) << b.log2_den_;
    __int128 rhs = static_cast<__int128>(b.num_) << a.log2_den_;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

bool Dyadic::product_at_least_one(const Dyadic& a, const Dyadic& b) {
    __int128 prod = static_cast<__int128>(a.num_) * b.num_;
    __int128 one = static_cast<__int128>(1) << (a.log2_den_ + b.log2_den_);
    return prod >= one;
}

std::int64_t Dyadic::ceil_square() const {
    __int128 sq = static_cast<__int128>(num_) * num_;
    int shift = 2 * log2_den_;
    __int128 q = sq >> shift;
    if ((sq & ((static_cast<__int128>(1) << shift) - 1)) != 0) ++q;
    return static_cast<std::int64_t>(q);
}

double Dyadic::to_double() const {
    return std::ldexp(static_cast<double>(num_), -log2_den_);
}

std::string Dyadic::to_string() const {
    if (log2_den_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(std::int64_t(1) << log2_den_);
}

}  // namespace spectral
