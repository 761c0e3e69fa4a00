#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tcval/errors.hpp"
#include "tcval/model.hpp"
#include "tcval/surface.hpp"

namespace {

using namespace tcval;

TEST(Model, AbmTransitionLaw) {
    const auto m = DiffusionModel::abm(0.0, 1.0);
    EXPECT_EQ(m.drift(0.3, 5.0), 0.0);
    EXPECT_EQ(m.diffusion(0.3, 5.0), 1.0);
    const auto law = *m.transition(0.0, 0.0, 1.0);
    EXPECT_EQ(law.family, TransitionLaw::Family::Gaussian);
    EXPECT_DOUBLE_EQ(law.mean(), 0.0);
    EXPECT_DOUBLE_EQ(law.variance(), 1.0);
}

TEST(Model, GbmLognormalMoments) {
    // E[y^n] = y0^n exp((n mu + n(n-1) sigma^2 / 2) T).
    const auto law = *DiffusionModel::gbm(0.0, 0.2).transition(0.0, 1.0, 1.0);
    EXPECT_NEAR(law.mean(), 1.0, 1e-15);
    EXPECT_NEAR(law.variance() + law.mean() * law.mean(), std::exp(0.04), 1e-14);
}

TEST(Model, OuMean) {
    const auto law = *DiffusionModel::ou(1.0, 0.0, 1.0).transition(0.0, 2.0, 1.0);
    EXPECT_NEAR(law.mean(), 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(law.variance(), (1.0 - std::exp(-2.0)) / 2.0, 1e-15);
}

TEST(Model, MakeModelNamesTheOffendingField) {
    auto field_of = [](ModelKind kind, const ParameterSet& p) -> std::string {
        try {
            make_model(kind, p);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return "";
    };
    EXPECT_EQ(field_of(ModelKind::GBM, {{"mu", 0.0}, {"sigma", 0.0}}), "model.sigma");
    EXPECT_EQ(field_of(ModelKind::GBM, {{"mu", 0.0}}), "model.sigma");
    EXPECT_EQ(field_of(ModelKind::ABM, {{"drift", 0.0}, {"diffusion", 1.0}, {"vol", 1.0}}),
              "model.vol");
    EXPECT_EQ(field_of(ModelKind::OU, {{"kappa", -1.0}, {"theta", 0.0}, {"diffusion", 1.0}}),
              "model.kappa");
    EXPECT_EQ(field_of(ModelKind::ABM, {{"drift", 0.0}, {"diffusion", -1.0}}), "model.diffusion");
    EXPECT_EQ(field_of(ModelKind::ABM, {{"drift", NAN}, {"diffusion", 1.0}}), "model.drift");
}

TEST(Model, CustomModelHasNoTransitionLaw) {
    const auto m = DiffusionModel::custom([](double, double y) { return -y; },
                                          [](double, double) { return 0.5; }, 1.0);
    EXPECT_FALSE(m.has_transition());
    EXPECT_FALSE(m.transition(0.0, 1.0, 2.0).has_value());
    EXPECT_EQ(m.lipschitz_bound().value(), 1.0);
    EXPECT_THROW(DiffusionModel::custom(nullptr, [](double, double) { return 1.0; }, 1.0),
                 ConfigError);
}

TEST(Model, DriftShiftStaysInFamily) {
    const auto abm = DiffusionModel::abm(0.1, 2.0).with_drift_shift(0.3);
    EXPECT_DOUBLE_EQ(abm.drift(0.0, 7.0), 0.1 + 0.3 * 2.0);
    const auto ou = DiffusionModel::ou(2.0, 1.0, 0.5).with_drift_shift(0.4);
    EXPECT_NEAR(ou.drift(0.0, 3.0), 2.0 * (1.0 - 3.0) + 0.4 * 0.5, 1e-15);
    const auto gbm = DiffusionModel::gbm(0.05, 0.2).with_drift_shift(-0.5);
    EXPECT_NEAR(gbm.drift(0.0, 2.0), (0.05 - 0.5 * 0.2) * 2.0, 1e-15);
    EXPECT_EQ(gbm.kind(), ModelKind::GBM);
}

TEST(Payoff, EvaluationExamples) {
    const std::vector<double> a{0.5, 1.0, 1.5};
    EXPECT_EQ(evaluate_payoff(Payoff::call(1.0), a), (std::vector<double>{0.0, 0.0, 0.5}));
    const std::vector<double> b{-1.0, 0.0, 1.0};
    EXPECT_EQ(evaluate_payoff(Payoff::linear(1.0, 0.0), b), b);
    const std::vector<double> c{1.0, 2.0, 3.0};
    EXPECT_EQ(evaluate_payoff(Payoff::power(2.0), c), (std::vector<double>{1.0, 4.0, 9.0}));
    const auto hat = Payoff::piecewise_linear({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0},
                                              Monotonicity::NonMonotone);
    EXPECT_EQ(hat(-5.0), 0.0);
    EXPECT_EQ(hat(0.5), 0.5);
    EXPECT_EQ(hat(1.5), 0.5);
    EXPECT_EQ(hat(9.0), 0.0);
}

TEST(Payoff, ContractViolations) {
    const std::vector<double> nodes{-1.0, 0.0, 1.0};
    const Payoff lying(PayoffKind::Linear, {-1.0, 0.0}, Monotonicity::Increasing);
    EXPECT_THROW(evaluate_payoff(lying, nodes), ContractError);
    EXPECT_THROW(evaluate_payoff(Payoff::linear(1.0).with_positive(true), nodes), ContractError);
    EXPECT_THROW(Payoff(PayoffKind::Call, {}, Monotonicity::Increasing), ConfigError);
    EXPECT_THROW(Payoff::piecewise_linear({1.0, 0.0}, {0.0, 1.0}, Monotonicity::Increasing),
                 ConfigError);
}

TEST(Payoff, EvaluationIsDeterministic) {
    std::vector<double> nodes;
    for (int j = 0; j < 101; ++j) nodes.push_back(0.1 + 0.037 * j);
    const auto p = Payoff::power(1.7);
    const auto first = evaluate_payoff(p, nodes);
    for (int rep = 0; rep < 5; ++rep) EXPECT_EQ(evaluate_payoff(p, nodes), first);
}

TEST(Payoff, KinksAndGrowth) {
    EXPECT_EQ(Payoff::call(2.0).kinks(), std::vector<double>{2.0});
    EXPECT_TRUE(Payoff::linear(1.0).kinks().empty());
    EXPECT_EQ(Payoff::power(2.0).upper_growth(), Growth::Superlinear);
    EXPECT_EQ(Payoff::power(2.0).lower_growth(), Growth::Superlinear);
    EXPECT_EQ(Payoff::power(3.0).lower_growth(), Growth::Bounded);
    EXPECT_EQ(Payoff::call(0.0).upper_growth(), Growth::Linear);
    EXPECT_EQ(Payoff::put(0.0).upper_growth(), Growth::Bounded);
    EXPECT_EQ(Payoff::put(0.0).lower_growth(), Growth::Linear);
}

TEST(Grid, DomainExamples) {
    GridSpec spec;
    spec.n_stddevs = 6.0;
    const Grid g1 = build_grid(DiffusionModel::abm(0.0, 1.0), spec);
    EXPECT_DOUBLE_EQ(g1.node(0), -6.0);
    EXPECT_DOUBLE_EQ(g1.node(g1.n_space() - 1), 6.0);

    spec.T = 4.0;
    spec.n_stddevs = 3.0;
    const Grid g2 = build_grid(DiffusionModel::abm(0.0, 2.0), spec);
    EXPECT_DOUBLE_EQ(g2.node(0), -12.0);
    EXPECT_DOUBLE_EQ(g2.node(g2.n_space() - 1), 12.0);

    GridSpec gspec;
    gspec.y_center = 1.0;
    const Grid g3 = build_grid(DiffusionModel::gbm(0.0, 0.5), gspec);
    EXPECT_GT(g3.node(0), 0.0);
    for (std::size_t j = 1; j < g3.n_space(); ++j) EXPECT_GT(g3.node(j), g3.node(j - 1));
}

TEST(Grid, RejectsDegenerateInput) {
    GridSpec spec;
    spec.T = 0.0;
    EXPECT_THROW(build_grid(DiffusionModel::abm(0.0, 1.0), spec), ConfigError);
    spec = {};
    spec.n_space = 2;
    EXPECT_THROW(build_grid(DiffusionModel::abm(0.0, 1.0), spec), ConfigError);
    spec = {};
    EXPECT_THROW(build_grid(DiffusionModel::abm(0.0, 0.0), spec), ConfigError);
    spec.y_center = -1.0;
    EXPECT_THROW(build_grid(DiffusionModel::gbm(0.0, 0.2), spec), ConfigError);
}

TEST(Grid, TimeLookupAndPrefix) {
    GridSpec spec;
    spec.t0 = 0.5;
    spec.T = 1.5;
    spec.n_time = 10;
    const Grid g = build_grid(DiffusionModel::abm(0.0, 1.0), spec);
    EXPECT_DOUBLE_EQ(g.dt(), 0.1);
    EXPECT_EQ(g.time_index(0.5), 0u);
    EXPECT_EQ(g.time_index(1.5), 10u);
    EXPECT_EQ(g.time_index(g.time(7)), 7u);
    EXPECT_THROW(g.time_index(0.55), LookupError);
    EXPECT_THROW(g.time_index(2.0), LookupError);
    const Grid head = g.prefix(4);
    EXPECT_EQ(head.n_time(), 4u);
    EXPECT_EQ(head.dt(), g.dt());
    EXPECT_EQ(head.time(3), g.time(3));
    EXPECT_THROW(g.prefix(11), ConfigError);
}

TEST(Grid, InterpolationReproducesLinearFunctions) {
    GridSpec spec;
    spec.y_center = 1.0;
    spec.n_space = 31;
    const Grid g = build_grid(DiffusionModel::gbm(0.0, 0.3), spec);
    std::vector<double> row(g.n_space());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = 2.0 * g.node(j) - 1.0;
    for (double y : {0.05, 0.5, 1.0, 1.37, 4.0, 40.0}) {
        EXPECT_NEAR(g.interpolate(row, y), 2.0 * y - 1.0, 1e-12 * (1.0 + y)) << y;
    }
}

TEST(Grid, CentralWindowCoversMiddleHalf) {
    GridSpec spec;
    spec.n_space = 201;
    const Grid g = build_grid(DiffusionModel::abm(0.0, 1.0), spec);
    const auto [first, last] = g.central_window(0.5);
    EXPECT_DOUBLE_EQ(g.node(first), -3.0);
    EXPECT_DOUBLE_EQ(g.node(last - 1), 3.0);
}

struct MonteCarloCase {
    DiffusionModel model;
    double y0;
};

// Euler paths (400 steps, 1e5 paths) against the analytic mean and variance.
TEST(Model, MonteCarloMomentsMatchTransitionLaw) {
    const std::vector<MonteCarloCase> cases{
        {DiffusionModel::abm(0.3, 0.8), 0.5},
        {DiffusionModel::ou(1.5, 0.2, 0.7), 1.0},
        {DiffusionModel::gbm(0.08, 0.25), 1.0},
    };
    constexpr std::size_t paths = 100000;
    constexpr std::size_t steps = 400;
    const double T = 1.0, dt = T / steps, sq = std::sqrt(dt);
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> z;
    for (const auto& c : cases) {
        double s1 = 0.0, s2 = 0.0, s4 = 0.0;
        std::vector<double> ends(paths);
        for (std::size_t p = 0; p < paths; ++p) {
            double y = c.y0;
            for (std::size_t k = 0; k < steps; ++k) {
                const double t = k * dt;
                y += c.model.drift(t, y) * dt + c.model.diffusion(t, y) * sq * z(rng);
            }
            ends[p] = y;
            s1 += y;
        }
        const double mean = s1 / paths;
        for (double y : ends) {
            const double d = y - mean;
            s2 += d * d;
            s4 += d * d * d * d;
        }
        const double var = s2 / (paths - 1);
        const double se_mean = std::sqrt(var / paths);
        const double se_var = std::sqrt((s4 / paths - var * var) / paths);
        const auto law = *c.model.transition(0.0, c.y0, T);
        EXPECT_LT(std::abs(mean - law.mean()), 3.0 * se_mean) << to_string(c.model.kind());
        EXPECT_LT(std::abs(var - law.variance()), 3.0 * se_var) << to_string(c.model.kind());
    }
}

}  // namespace
