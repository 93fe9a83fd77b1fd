#include <benchmark/benchmark.h>

#include <random>

#include "spectral/boolfn.hpp"
#include "spectral/restriction.hpp"
#include "spectral/zp.hpp"

namespace {

spectral::BooleanFunction random_function(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::int8_t> values(std::size_t(1) << n);
    for (auto& v : values) v = (rng() & 1) ? -1 : 1;
    return spectral::BooleanFunction(n, std::move(values));
}

void BM_wht_forward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    spectral::BooleanFunction f = random_function(n, 1);
    for (auto _ : state) {
        spectral::Spectrum s = spectral::wht_forward(f);
        benchmark::DoNotOptimize(s.scaled().data());
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t(1) << n));
}
BENCHMARK(BM_wht_forward)->DenseRange(10, 22, 4);

void BM_restrict_spectrum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    spectral::Spectrum s = spectral::wht_forward(random_function(n, 2));
    for (auto _ : state) {
        spectral::Spectrum r = spectral::restrict_spectrum(s, spectral::LinearForm(0b101), +1);
        benchmark::DoNotOptimize(r.scaled().data());
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t(1) << n));
}
BENCHMARK(BM_restrict_spectrum)->DenseRange(10, 22, 4);

void BM_dft_forward_p3(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) size *= 3;
    std::vector<std::int8_t> values(size);
    for (auto& v : values) v = (rng() & 1) ? -1 : 1;
    spectral::zp::ZpFunction f(3, n, std::move(values));
    for (auto _ : state) {
        spectral::zp::ZpSpectrum s = spectral::zp::dft_forward(f);
        benchmark::DoNotOptimize(s.coeffs().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size));
}
BENCHMARK(BM_dft_forward_p3)->DenseRange(4, 10, 2);

}  // namespace

BENCHMARK_MAIN();
