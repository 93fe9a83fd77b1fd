#include "spectral/boolfn.hpp"

#include <algorithm>

#include "spectral/pdt.hpp"
#include "spectral/restriction.hpp"

namespace spectral {

namespace {

// Public entry points ask for 1 <= n <= 24; the containers also accept the
// 0-dimensional case so that a chain of restrictions can bottom out at a
// single constant value.
void require_dim(int n) {
    if (n < 0 || n > kMaxVars)
        throw ParamError("dimension must be in [0, " + std::to_string(kMaxVars) + "], got " +
                         std::to_string(n));
}

void require_positive_dim(int n) {
    if (n < 1 || n > kMaxVars)
        throw ParamError("dimension must be in [1, " + std::to_string(kMaxVars) + "], got " +
                         std::to_string(n));
}

// Unnormalized self-inverse butterfly: out[a] = sum_x in[x] (-1)^<a,x>.
void butterfly(std::vector<std::int64_t>& v) {
    const std::size_t n = v.size();
    for (std::size_t stride = 1; stride < n; stride <<= 1) {
        for (std::size_t base = 0; base < n; base += 2 * stride) {
            for (std::size_t j = base; j < base + stride; ++j) {
                std::int64_t a = v[j];
                std::int64_t b = v[j + stride];
                v[j] = a + b;
                v[j + stride] = a - b;
            }
        }
    }
}

}  // namespace

BooleanFunction::BooleanFunction(int n, std::vector<std::int8_t> values)
    : n_(n), values_(std::move(values)) {
    require_dim(n);
    if (values_.size() != (std::size_t(1) << n))
        throw ParamError("truth table length must be 2^n");
    for (std::int8_t v : values_)
        if (v != 1 && v != -1) throw ParamError("truth table entries must be +1 or -1");
}

BooleanFunction BooleanFunction::constant(int n, int value) {
    return BooleanFunction(n, std::vector<std::int8_t>(std::size_t(1) << n,
                                                       static_cast<std::int8_t>(value)));
}

Spectrum::Spectrum(int n, std::vector<std::int64_t> scaled) : n_(n), scaled_(std::move(scaled)) {
    require_dim(n);
    if (scaled_.size() != (std::size_t(1) << n))
        throw ParamError("spectrum length must be 2^n");
    const std::int64_t cap = std::int64_t(1) << n;
    for (std::int64_t c : scaled_)
        if (c < -cap || c > cap) throw ParamError("scaled coefficient out of [-2^n, 2^n]");
}

bool Spectrum::parseval_ok() const {
    __int128 sum = 0;
    for (std::int64_t c : scaled_) sum += static_cast<__int128>(c) * c;
    return sum == (static_cast<__int128>(1) << (2 * n_));
}

Spectrum wht_forward(const BooleanFunction& f) {
    std::vector<std::int64_t> v(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) v[x] = f(static_cast<Mask>(x));
    butterfly(v);
    return Spectrum(f.n(), std::move(v));
}

BooleanFunction wht_inverse(const Spectrum& s) {
    std::vector<std::int64_t> v = s.scaled();
    butterfly(v);
    const std::int64_t full = std::int64_t(1) << s.n();
    std::vector<std::int8_t> values(v.size());
    for (std::size_t x = 0; x < v.size(); ++x) {
        if (v[x] == full)
            values[x] = 1;
        else if (v[x] == -full)
            values[x] = -1;
        else
            throw NotBooleanError("reconstructed value " + std::to_string(v[x]) + "/" +
                                  std::to_string(full) + " at x=" + std::to_string(x) +
                                  " is not +1 or -1");
    }
    return BooleanFunction(s.n(), std::move(values));
}

Dyadic spectral_norm(const Spectrum& s) {
    std::int64_t sum = 0;
    for (std::int64_t c : s.scaled()) sum += c < 0 ? -c : c;
    return Dyadic(sum, s.n());
}

std::int64_t sparsity(const Spectrum& s) {
    std::int64_t count = 0;
    for (std::int64_t c : s.scaled()) count += (c != 0);
    return count;
}

TopTwo top_two(const Spectrum& s) {
    // (|scaled| descending, mask ascending); a single scan suffices.
    std::int64_t best = -1, second = -1;
    Mask alpha = 0, beta = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::int64_t mag = s.scaled(static_cast<Mask>(i));
        if (mag < 0) mag = -mag;
        if (mag > best) {
            second = best;
            beta = alpha;
            best = mag;
            alpha = static_cast<Mask>(i);
        } else if (mag > second) {
            second = mag;
            beta = static_cast<Mask>(i);
        }
    }
    if (second <= 0)
        throw TooSparseError("top_two requires at least two nonzero coefficients");
    return TopTwo{alpha, beta};
}

std::int64_t convolution_check(const Spectrum& s, Mask delta) {
    if (delta == 0) throw ZeroFormError("convolution_check requires delta != 0");
    __int128 sum = 0;
    const auto& c = s.scaled();
    for (std::size_t g = 0; g < c.size(); ++g)
        sum += static_cast<__int128>(c[g]) * c[g ^ delta];
    return static_cast<std::int64_t>(sum);
}

namespace {

BooleanFunction gen_subspace_indicator(int n, int k, std::mt19937_64& rng) {
    if (k < 0 || k > n) throw ParamError("subspace indicator needs 0 <= k <= n");
    AffineRestriction r;
    std::uniform_int_distribution<Mask> form_dist(1, (Mask(1) << n) - 1);
    std::uniform_int_distribution<int> bit(0, 1);
    while (static_cast<int>(r.co_dimension()) < k) {
        // Dependent draws are simply rejected.
        r.try_push(form_dist(rng), bit(rng) ? 1 : -1);
    }
    std::vector<std::int8_t> values(std::size_t(1) << n);
    for (std::size_t x = 0; x < values.size(); ++x) {
        bool in_v = true;
        for (const auto& c : r.constraints())
            if ((parity(c.form, static_cast<Mask>(x)) ? -1 : 1) != c.value) {
                in_v = false;
                break;
            }
        values[x] = in_v ? -1 : 1;  // 1 - 2 * ind_V
    }
    return BooleanFunction(n, std::move(values));
}

}  // namespace

BooleanFunction gen(GenKind kind, int n, const GenParams& params, std::uint64_t seed) {
    require_positive_dim(n);
    std::mt19937_64 rng(seed);
    const std::size_t table = std::size_t(1) << n;
    std::vector<std::int8_t> values(table);
    switch (kind) {
        case GenKind::And:
            for (std::size_t x = 0; x < table; ++x) values[x] = (x == table - 1) ? -1 : 1;
            break;
        case GenKind::Or:
            for (std::size_t x = 0; x < table; ++x) values[x] = (x != 0) ? -1 : 1;
            break;
        case GenKind::Majority: {
            if (n % 2 == 0) throw ParamError("majority requires odd n");
            for (std::size_t x = 0; x < table; ++x)
                values[x] = (__builtin_popcountll(x) > n / 2) ? -1 : 1;
            break;
        }
        case GenKind::Parity: {
            Mask mask = params.mask;
            if (mask >= table) throw ParamError("parity mask out of range");
            for (std::size_t x = 0; x < table; ++x)
                values[x] = parity(mask, static_cast<Mask>(x)) ? -1 : 1;
            break;
        }
        case GenKind::SubspaceIndicator:
            return gen_subspace_indicator(n, params.k, rng);
        case GenKind::RandomPdt: {
            if (params.m < 1) throw ParamError("random_pdt needs a positive leaf count");
            ParityDecisionTree t = random_pdt(n, params.m, rng);
            return evaluate_to_table(t);
        }
        case GenKind::Random: {
            std::uniform_int_distribution<int> bit(0, 1);
            for (std::size_t x = 0; x < table; ++x) values[x] = bit(rng) ? -1 : 1;
            break;
        }
    }
    return BooleanFunction(n, std::move(values));
}

}  // namespace spectral
