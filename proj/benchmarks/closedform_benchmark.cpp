#include <benchmark/benchmark.h>

#include "tcval/closedform.hpp"

namespace {

void BM_IndifferenceSmooth(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::ou(1.0, 0.0, 1.0);
    const auto payoff = tcval::Payoff::linear(1.0);
    const tcval::RiskAversion risk = tcval::FlatRiskAversion{1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(tcval::exp_indifference_price(model, payoff, risk, 0.0, 0.3, 1.0));
    }
}
BENCHMARK(BM_IndifferenceSmooth);

void BM_IndifferenceKinked(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::abm(0.0, 1.0);
    const auto payoff = tcval::Payoff::call(0.2);
    const tcval::RiskAversion risk = tcval::FlatRiskAversion{1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(tcval::exp_indifference_price(model, payoff, risk, 0.0, 0.0, 1.0));
    }
}
BENCHMARK(BM_IndifferenceKinked);

void BM_PowerPriceLognormal(benchmark::State& state) {
    const auto model = tcval::DiffusionModel::gbm(0.0, 0.2);
    const auto payoff = tcval::Payoff::linear(1.0).with_positive(true);
    for (auto _ : state) benchmark::DoNotOptimize(tcval::power_price(model, payoff, 1.0, 0.0, 0.0, 1.0, 1.0));
}
BENCHMARK(BM_PowerPriceLognormal);

}  // namespace
