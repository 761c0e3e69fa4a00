#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tcval/principles.hpp"

namespace {

tcval::DiscreteDistribution random_distribution(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<tcval::Outcome> outcomes(n);
    double total = 0.0;
    for (auto& o : outcomes) {
        o.value = u(rng) - 0.5;
        o.probability = 0.1 + u(rng);
        total += o.probability;
    }
    for (auto& o : outcomes) o.probability /= total;
    return tcval::DiscreteDistribution(std::move(outcomes));
}

void BM_VarQuantile(benchmark::State& state) {
    const auto dist = random_distribution(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tcval::var_quantile(dist, 0.995));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VarQuantile)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_MeanValueStep(benchmark::State& state) {
    const auto dist = random_distribution(4);
    const auto v = tcval::Distortion::exponential(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(tcval::mean_value_step(dist, v, 0.02, 0.0, 0.01));
}
BENCHMARK(BM_MeanValueStep);

}  // namespace
