#pragma once

// Independent reference implementations the tests check the library against.
// Everything here is deliberately naive (quadratic transforms, pointwise
// restriction through lifted inputs) and shares no code with the library
// paths it validates.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "spectral/boolfn.hpp"
#include "spectral/zp.hpp"

namespace oracles {

// O(4^n) definition-chasing transform: out[a] = sum_x f(x) (-1)^<a,x>.
inline std::vector<std::int64_t> naive_wht(const spectral::BooleanFunction& f) {
    const std::size_t size = f.size();
    std::vector<std::int64_t> out(size, 0);
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t x = 0; x < size; ++x) {
            int sign = __builtin_parity(a & x) ? -1 : 1;
            out[a] += sign * f(static_cast<spectral::Mask>(x));
        }
    return out;
}

// Truth-table restriction to chi_gamma = b, re-indexed by deleting the
// lowest set bit of gamma (the same quotient map the spectral path uses,
// reached through plain point lifting).
inline spectral::BooleanFunction restrict_table(const spectral::BooleanFunction& f,
                                                spectral::Mask gamma, int b) {
    const int pivot = __builtin_ctz(gamma);
    const int target = b == 1 ? 0 : 1;
    std::vector<std::int8_t> values(f.size() >> 1);
    for (std::size_t xq = 0; xq < values.size(); ++xq) {
        spectral::Mask low = static_cast<spectral::Mask>(xq) & ((spectral::Mask(1) << pivot) - 1);
        spectral::Mask high = static_cast<spectral::Mask>(xq) >> pivot;
        spectral::Mask x = low | (high << (pivot + 1));
        spectral::Mask rest = gamma & ~(spectral::Mask(1) << pivot);
        int bit = target ^ spectral::parity(rest, x);
        x |= static_cast<spectral::Mask>(bit) << pivot;
        values[xq] = static_cast<std::int8_t>(f(x));
    }
    return spectral::BooleanFunction(f.n() - 1, std::move(values));
}

// Every Boolean function on n variables, enumerated by table bitmask.
inline spectral::BooleanFunction function_by_index(int n, std::uint64_t index) {
    std::vector<std::int8_t> values(std::size_t(1) << n);
    for (std::size_t x = 0; x < values.size(); ++x)
        values[x] = (index >> x) & 1 ? -1 : 1;
    return spectral::BooleanFunction(n, std::move(values));
}

inline spectral::BooleanFunction random_function(int n, std::mt19937_64& rng) {
    std::vector<std::int8_t> values(std::size_t(1) << n);
    for (auto& v : values) v = (rng() & 1) ? -1 : 1;
    return spectral::BooleanFunction(n, std::move(values));
}

// --- Z_p^n reference pieces --------------------------------------------

// O(p^2n) definition-chasing transform.
inline std::vector<std::complex<double>> naive_dft_p(const spectral::zp::ZpFunction& f) {
    using spectral::zp::Code;
    const std::size_t size = f.size();
    std::vector<std::complex<double>> out(size, 0.0);
    for (std::size_t a = 0; a < size; ++a) {
        for (std::size_t x = 0; x < size; ++x) {
            int e = spectral::zp::dot(static_cast<Code>(a), static_cast<Code>(x), f.n(), f.p());
            double angle = -2.0 * 3.14159265358979323846 * e / f.p();
            out[a] += std::polar(1.0, angle) * static_cast<double>(f(static_cast<Code>(x)));
        }
        out[a] /= static_cast<double>(size);
    }
    return out;
}

// Pointwise restriction to chi_gamma = omega^lambda with the canonical
// pivot-deletion quotient.
inline spectral::zp::ZpFunction restrict_table_p(const spectral::zp::ZpFunction& f,
                                                 spectral::zp::Code gamma, int lambda) {
    using namespace spectral::zp;
    const int p = f.p(), n = f.n();
    int pivot = 0;
    {
        Code g = gamma;
        while (g % p == 0) {
            g /= p;
            ++pivot;
        }
    }
    const int pivot_digit = digit(gamma, pivot, p);
    const int inv = inverse_mod(pivot_digit, p);
    std::size_t out_size = f.size() / static_cast<std::size_t>(p);
    std::vector<std::int8_t> values(out_size);
    std::size_t stride = 1;
    for (int i = 0; i < pivot; ++i) stride *= static_cast<std::size_t>(p);
    for (std::size_t xq = 0; xq < out_size; ++xq) {
        Code low = static_cast<Code>(xq % stride);
        Code high = static_cast<Code>(xq / stride);
        Code x = low + high * static_cast<Code>(stride) * static_cast<Code>(p);
        // Solve the pivot digit: <gamma, x> = lambda  (mod p).
        int partial = dot(gamma, x, n, p);
        int needed = (lambda - partial % p + 2 * p) % p * inv % p;
        x = set_digit(x, pivot, p, needed);
        values[xq] = static_cast<std::int8_t>(f(x));
    }
    return spectral::zp::ZpFunction(p, n - 1, std::move(values));
}

inline spectral::zp::ZpFunction zp_function_by_index(int p, int n, std::uint64_t index) {
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) size *= static_cast<std::size_t>(p);
    std::vector<std::int8_t> values(size);
    for (std::size_t x = 0; x < size; ++x) values[x] = (index >> x) & 1 ? -1 : 1;
    return spectral::zp::ZpFunction(p, n, std::move(values));
}

inline spectral::zp::ZpFunction random_zp_function(int p, int n, std::mt19937_64& rng) {
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) size *= static_cast<std::size_t>(p);
    std::vector<std::int8_t> values(size);
    for (auto& v : values) v = (rng() & 1) ? -1 : 1;
    return spectral::zp::ZpFunction(p, n, std::move(values));
}

}  // namespace oracles
