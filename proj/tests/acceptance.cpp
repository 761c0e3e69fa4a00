// One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "property_suites.hpp"
#include "tcval/closedform.hpp"
#include "tcval/harness.hpp"
#include "tcval/lattice.hpp"
#include "tcval/normal.hpp"
#include "tcval/pde.hpp"

namespace {

using namespace tcval;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = limit_s <= 0.0 || seconds < limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    char timing[96];
    if (limit_s > 0.0) {
        std::snprintf(timing, sizeof timing, "%.3g s (limit %g s%s)", seconds, limit_s,
                      in_time ? "" : ", exceeded");
    } else {
        std::snprintf(timing, sizeof timing, "%.3g s", seconds);
    }
    std::printf("%s  C%d  %s: %s [%s]\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                timing);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double round_sig(double x, int digits) {
    const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(x))));
    return std::round(x * scale) / scale;
}

Grid grid_for(const DiffusionModel& m, std::size_t n_time, std::size_t n_space, double y0 = 0.0,
              double n_stddevs = 6.0) {
    GridSpec spec;
    spec.n_time = n_time;
    spec.n_space = n_space;
    spec.y_center = y0;
    spec.n_stddevs = n_stddevs;
    return build_grid(m, spec);
}

double window_sup(const Grid& g, const std::function<double(std::size_t)>& err) {
    const auto [first, last] = g.central_window(0.5);
    double sup = 0.0;
    for (std::size_t j = first; j < last; ++j) sup = std::max(sup, std::abs(err(j)));
    return sup;
}

bool in_band(double x, double lo, double hi) { return x >= lo && x <= hi; }

Outcome calibration() {
    const auto c = calibrate_quadrinomial(0.995);
    const bool ok = round_sig(c.k, 3) == 2.58 && round_sig(c.l, 3) == 0.971;
    return {ok, "k=" + fmt("%.3g", c.k) + " l=" + fmt("%.3g", c.l) + " (3 s.f.; expected 2.58, 0.971)"};
}

Outcome variance_limit() {
    const ConvergenceCase c{.id = "variance-abm",
                            .model = DiffusionModel::abm(0.0, 1.0),
                            .payoff = Payoff::linear(1.0),
                            .principle = PrincipleSpec::variance(1.0),
                            .grid = GridSpec{.n_space = 201}};
    const auto r = converge_lattice_to_limit(c, {64, 128, 256, 512, 1024}, ReferenceKind::ClosedForm);
    const double err = r.errors.back();
    const bool err_ok = err < 2e-3;
    const bool order_ok = in_band(r.fitted_order, 0.8, 1.2);
    std::string d = "error@1024=" + fmt("%.3g", err) + (err_ok ? " < 2e-3 ok" : " >= 2e-3") +
                    "; order in [0.8, 1.2]: ";
    if (r.status == ReportStatus::Exact) {
        d += "not measurable, the lattice is exact for this case (all errors at roundoff, status "
             "Exact)";
    } else {
        d += fmt("%.3f", r.fitted_order) + (order_ok ? " ok" : " out of band");
    }
    return {err_ok && order_ok, d};
}

Outcome hopf_cole() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const auto m = i % 2 == 0 ? DiffusionModel::abm(0.4 * u(rng) - 0.2, 0.5 + u(rng))
                                  : DiffusionModel::ou(0.5 + u(rng), u(rng) - 0.5, 0.5 + u(rng));
        const double alpha = 0.2 + 0.8 * u(rng);
        const double strike = u(rng) - 0.5;
        const Payoff f = i % 3 == 0 ? Payoff::call(strike)
                                    : (i % 3 == 1 ? Payoff::put(strike) : Payoff::linear(1.0));
        // exp(alpha f) is not linear at the edges, so the pi_yy = 0 boundary
        // costs O(1e-3) at 6 sd; 8 sd pushes that error below the window.
        const Grid g = grid_for(m, 400, 401, 0.0, 8.0);
        const auto nonlinear = solve_semilinear(m, f, Generator::variance_flat(alpha), g);
        std::vector<double> h(g.n_space());
        for (std::size_t j = 0; j < h.size(); ++j) h[j] = std::exp(alpha * f(g.node(j)));
        const auto linear =
            solve_semilinear(m, h, Generator::linear([](double, double) { return 0.0; }, 0.0), g);
        worst = std::max(worst, window_sup(g, [&](std::size_t j) {
                             return nonlinear.at(0, j) - std::log(linear.at(0, j)) / alpha;
                         }));
    }
    return {worst < 1e-3, "5 ABM/OU cases, worst sup-norm gap " + fmt("%.3g", worst) + " (< 1e-3)"};
}

Outcome power_benchmark() {
    const auto m = DiffusionModel::gbm(0.0, 0.2);
    const Grid g = grid_for(m, 400, 201, 1.0);
    const auto s = solve_semilinear(m, Payoff::linear(1.0).with_positive(true),
                                    Generator::power_benchmark(1.0, 0.0), g);
    const double err = std::abs(s.headline() - std::exp(0.02));
    return {err < 1e-3, "price " + fmt("%.6f", s.headline()) + " vs e^0.02, error " +
                            fmt("%.3g", err) + " (< 1e-3)"};
}

Outcome stddev_reduction() {
    const auto abm = DiffusionModel::abm(0.0, 1.0);
    const Grid g0 = grid_for(abm, 400, 201);
    const auto head = solve_semilinear(abm, Payoff::linear(1.0), Generator::stddev_abs(0.3, 0.0), g0);
    const double head_err = std::abs(head.headline() - 0.3);

    double worst = 0.0;
    const std::vector<DiffusionModel> models{DiffusionModel::abm(0.1, 0.8),
                                             DiffusionModel::ou(1.0, 0.0, 1.0)};
    for (const auto& m : models) {
        for (const auto& f : {Payoff::linear(1.0), Payoff::call(0.0), Payoff::put(0.2)}) {
            const Grid g = grid_for(m, 400, 201);
            const auto s = solve_semilinear(m, f, Generator::stddev_abs(0.3, 0.0), g);
            worst = std::max(worst, window_sup(g, [&](std::size_t j) {
                                 return s.at(0, j) - stddev_price(m, f, 0.3, 0.0, 0.0, g.node(j), 1.0);
                             }));
        }
    }
    const bool ok = head_err < 1e-3 && worst < 1e-3;
    return {ok, "ABM headline " + fmt("%.6f", head.headline()) + " vs 0.3; worst sup gap " +
                    fmt("%.3g", worst) + " over 6 monotone cases (< 1e-3)"};
}

Outcome coc_limit() {
    const ConvergenceCase c{.id = "coc-ou",
                            .model = DiffusionModel::ou(1.0, 0.0, 1.0),
                            .payoff = Payoff::linear(1.0),
                            .principle = PrincipleSpec::cost_of_capital(0.06, 0.995, 0.0),
                            .grid = GridSpec{.n_space = 201},
                            .tree = TreeKind::Quadrinomial};
    const auto r = coc_equals_stddev_limit(c, 0.06, 0.995, {64, 128, 256, 512, 1024});
    const bool ok = r.status == ReportStatus::Ok && r.errors.back() < 5e-3 &&
                    in_band(r.fitted_order, 0.8, 1.2);
    return {ok, "OU(1,0,1), f=y: sup error@1024 " + fmt("%.3g", r.errors.back()) +
                    " (< 5e-3), order " + fmt("%.3f", r.fitted_order) + " (in [0.8, 1.2])"};
}

Outcome davis() {
    const ConvergenceCase c{.id = "davis",
                            .model = DiffusionModel::abm(0.0, 1.0),
                            .payoff = Payoff::linear(1.0),
                            .principle = PrincipleSpec::variance_discounted(1.0, 1.0, 0.0),
                            .grid = GridSpec{.n_time = 200, .n_space = 201},
                            .engine = EngineKind::PDE};
    const auto r = davis_is_marginal_price(c, Payoff::linear(1.0), {1e-1, 1e-2, 1e-3, 1e-4});
    bool decreasing = true;
    for (std::size_t i = 1; i < r.gaps.size(); ++i) decreasing &= r.gaps[i] < r.gaps[i - 1];
    const bool ok = decreasing && in_band(r.fitted_order, 0.8, 1.2) && r.gaps.back() < 1e-3;
    return {ok, "Davis price " + fmt("%.6f", r.davis_headline) + ", order in eps " +
                    fmt("%.3f", r.fitted_order) + ", final gap " + fmt("%.3g", r.gaps.back()) +
                    " (< 1e-3)"};
}

Outcome property_suites() {
    using Suite = tcval::testing::SuiteResult (*)(std::size_t, std::uint64_t);
    const std::vector<Suite> suites{
        tcval::testing::cash_additivity_suite,      tcval::testing::loading_nonnegativity_suite,
        tcval::testing::positive_homogeneity_suite, tcval::testing::comparison_principle_suite,
        tcval::testing::time_consistency_suite,     tcval::testing::var_quantile_oracle_suite};
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < suites.size(); ++i) {
        const auto r = suites[i](240, 1000 + i);
        ok &= r.passed() && r.cases >= 200;
        if (!detail.empty()) detail += ", ";
        detail += r.name + " " + std::to_string(r.failures) + "/" + std::to_string(r.cases);
        if (!r.passed()) detail += " (" + r.first_failure + ")";
    }
    return {ok, "failures/cases: " + detail};
}

Outcome mean_value_unification() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double T = 0.25 + 1.75 * u(rng);
        const double sigma = 0.1 + 0.5 * u(rng);
        const auto gauss = i % 2 == 0 ? DiffusionModel::abm(0.2 * u(rng) - 0.1, sigma)
                                      : DiffusionModel::ou(0.5 + u(rng), 0.2, sigma);
        const Payoff f = i % 3 == 0 ? Payoff::call(u(rng) - 0.5) : Payoff::linear(0.5 + u(rng));
        const double alpha = 0.1 + 1.5 * u(rng);
        const double y = u(rng) - 0.5;
        const double a = mean_value_price(gauss, f, Distortion::exponential(alpha), 0, 0, y, T);
        const double b = exp_indifference_price(gauss, f, FlatRiskAversion{alpha}, 0, y, T);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));

        const auto gbm = DiffusionModel::gbm(0.1 * u(rng), sigma);
        const double gamma = 2.0 * u(rng);
        const Payoff p = Payoff::power(0.5 + u(rng));
        const double c = mean_value_price(gbm, p, Distortion::power(gamma), 0, 0, 1.0, T);
        const double d = power_price(gbm, p, gamma, 0, 0, 1.0, T);
        worst = std::max(worst, std::abs(c - d) / std::abs(d));
    }
    return {worst <= 1e-10, "20 cases (exp and power v), worst relative gap " + fmt("%.3g", worst) +
                                " (<= 1e-10)"};
}

}  // namespace

int main() {
    report(1, "quadrinomial calibration", 1e-3, calibration);
    report(2, "variance principle limit", 10.0, variance_limit);
    report(3, "Hopf-Cole equivalence", 30.0, hopf_cole);
    report(4, "power-benchmark price", 5.0, power_benchmark);
    report(5, "std-dev linear reduction", 0.0, stddev_reduction);
    report(6, "CoC to std-dev equivalence", 20.0, coc_limit);
    report(7, "Davis marginal price", 0.0, davis);
    report(8, "property suites", 0.0, property_suites);
    report(9, "mean-value unification", 0.0, mean_value_unification);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
