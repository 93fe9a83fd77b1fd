#include <benchmark/benchmark.h>

#include <random>

#include "spectral/km.hpp"
#include "spectral/pdt.hpp"

namespace {

using namespace spectral;

void BM_synth_exact_and(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Spectrum s = wht_forward(gen(GenKind::And, n));
    for (auto _ : state) {
        ParityDecisionTree t = synth_exact(s);
        benchmark::DoNotOptimize(&t.root());
    }
}
BENCHMARK(BM_synth_exact_and)->DenseRange(4, 12, 2);

void BM_synth_exact_random(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(5);
    std::vector<std::int8_t> values(std::size_t(1) << n);
    for (auto& v : values) v = (rng() & 1) ? -1 : 1;
    Spectrum s = wht_forward(BooleanFunction(n, std::move(values)));
    for (auto _ : state) {
        ParityDecisionTree t = synth_exact(s);
        benchmark::DoNotOptimize(&t.root());
    }
}
BENCHMARK(BM_synth_exact_random)->DenseRange(4, 8, 2);

void BM_bucket_estimator(benchmark::State& state) {
    TableOracle oracle(gen(GenKind::Majority, 15));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        double w = estimate_bucket_weight(oracle, oracle.n(), 0b101, 3,
                                          state.range(0), seed++);
        benchmark::DoNotOptimize(w);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_bucket_estimator)->Arg(1 << 10)->Arg(1 << 14);

}  // namespace

BENCHMARK_MAIN();
