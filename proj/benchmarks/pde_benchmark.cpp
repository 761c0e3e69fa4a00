#include <benchmark/benchmark.h>

#include "tcval/pde.hpp"

namespace {

void BM_VarianceFlatSolve(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::abm(0.0, 1.0);
    tcval::GridSpec spec;
    spec.n_time = 400;
    spec.n_space = static_cast<std::size_t>(state.range(0));
    const auto g = tcval::build_grid(model, spec);
    const auto generator = tcval::Generator::variance_flat(1.0);
    const auto payoff = tcval::Payoff::call(0.0);
    for (auto _ : state) benchmark::DoNotOptimize(tcval::solve_semilinear(model, payoff, generator, g));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VarianceFlatSolve)->Arg(101)->Arg(201)->Arg(401)->Arg(801)->Complexity()->Unit(benchmark::kMillisecond);

void BM_PowerBenchmarkSolve(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::gbm(0.0, 0.2);
    tcval::GridSpec spec;
    spec.n_time = 400;
    spec.y_center = 1.0;
    const auto g = tcval::build_grid(model, spec);
    const auto generator = tcval::Generator::power_benchmark(1.0, 0.0);
    const auto payoff = tcval::Payoff::linear(1.0).with_positive(true);
    for (auto _ : state) benchmark::DoNotOptimize(tcval::solve_semilinear(model, payoff, generator, g));
}
BENCHMARK(BM_PowerBenchmarkSolve)->Unit(benchmark::kMillisecond);

}  // namespace
