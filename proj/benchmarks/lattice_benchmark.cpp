#include <benchmark/benchmark.h>

#include "tcval/lattice.hpp"

namespace {

tcval::Grid grid(const tcval::DiffusionModel& model, std::size_t n_time, std::size_t n_space) {
    tcval::GridSpec spec;
    spec.n_time = n_time;
    spec.n_space = n_space;
    return tcval::build_grid(model, spec);
}

void BM_BinomialVariance(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::abm(0.0, 1.0);
    const auto g = grid(model, static_cast<std::size_t>(state.range(0)), 201);
    const auto principle = tcval::PrincipleSpec::variance(1.0);
    const auto payoff = tcval::Payoff::call(0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            tcval::backward_induct(model, payoff, principle, g, tcval::TreeKind::Binomial));
    }
}
BENCHMARK(BM_BinomialVariance)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_QuadrinomialCostOfCapital(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::ou(1.0, 0.0, 1.0);
    const auto g = grid(model, 256, 201);
    const auto principle = tcval::PrincipleSpec::cost_of_capital(0.06, 0.995, 0.0);
    const auto payoff = tcval::Payoff::linear(1.0);
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tcval::backward_induct(model, payoff, principle, g,
                                                        tcval::TreeKind::Quadrinomial, threads));
    }
}
BENCHMARK(BM_QuadrinomialCostOfCapital)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
