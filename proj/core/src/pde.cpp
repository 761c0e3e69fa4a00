#include "tcval/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcval/errors.hpp"
#include "tcval/normal.hpp"
#include "tcval/tridiagonal.hpp"

namespace tcval {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch) {
    const std::size_t n = diag.size();
    double denom = diag[0];
    if (denom == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch[i - 1];
        if (denom == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
        scratch[i] = (i + 1 < n) ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

// --- Generator -------------------------------------------------------------

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::VarianceFlat: return "VarianceFlat";
        case GeneratorKind::VarianceDiscounted: return "VarianceDiscounted";
        case GeneratorKind::PowerBenchmark: return "PowerBenchmark";
        case GeneratorKind::MeanValue: return "MeanValue";
        case GeneratorKind::StdDevAbs: return "StdDevAbs";
        case GeneratorKind::CoCAbs: return "CoCAbs";
        case GeneratorKind::Linear: return "Linear";
    }
    return "?";
}

Generator Generator::variance_flat(double alpha) {
    Generator g;
    g.kind_ = GeneratorKind::VarianceFlat;
    g.coefficient_ = alpha;
    return g;
}

Generator Generator::variance_discounted(double gamma, double X0, double r) {
    if (!(X0 > 0.0)) throw ConfigError("principle.X0", "must be > 0");
    Generator g;
    g.kind_ = GeneratorKind::VarianceDiscounted;
    g.coefficient_ = gamma;
    g.X0_ = X0;
    g.r_ = r;
    return g;
}

Generator Generator::power_benchmark(double gamma, double r) {
    Generator g;
    g.kind_ = GeneratorKind::PowerBenchmark;
    g.coefficient_ = gamma;
    g.r_ = r;
    return g;
}

Generator Generator::mean_value(Distortion v, double r) {
    Generator g;
    g.kind_ = GeneratorKind::MeanValue;
    g.v_ = std::move(v);
    g.r_ = r;
    return g;
}

Generator Generator::stddev_abs(double beta, double r) {
    Generator g;
    g.kind_ = GeneratorKind::StdDevAbs;
    g.coefficient_ = beta;
    g.r_ = r;
    return g;
}

Generator Generator::coc_abs(double delta, double q, double r) {
    Generator g;
    g.kind_ = GeneratorKind::CoCAbs;
    g.coefficient_ = delta * inverse_normal_cdf(q);
    g.r_ = r;
    return g;
}

Generator Generator::linear(Coefficient drift_adjustment, double r) {
    Generator g;
    g.kind_ = GeneratorKind::Linear;
    g.adjustment_ = drift_adjustment ? std::move(drift_adjustment)
                                     : Coefficient([](double, double) { return 0.0; });
    g.r_ = r;
    return g;
}

double Generator::explicit_part(double t, double, double Y, double Z) const {
    switch (kind_) {
        case GeneratorKind::VarianceFlat: return 0.5 * coefficient_ * Z * Z;
        case GeneratorKind::VarianceDiscounted:
            return 0.5 * coefficient_ / (X0_ * std::exp(r_ * t)) * Z * Z;
        case GeneratorKind::PowerBenchmark: return 0.5 * coefficient_ / Y * Z * Z;
        case GeneratorKind::MeanValue: return 0.5 * v_->local_risk_aversion(Y) * Z * Z;
        case GeneratorKind::StdDevAbs:
        case GeneratorKind::CoCAbs: return coefficient_ * std::abs(Z);
        case GeneratorKind::Linear: return 0.0;
    }
    return 0.0;
}

double Generator::evaluate(double t, double y, double Y, double Z, double b) const {
    if (kind_ == GeneratorKind::Linear) return adjustment_(t, y) / b * Z - r_ * Y;
    if (kind_ == GeneratorKind::MeanValue) return explicit_part(t, y, Y, Z);
    return explicit_part(t, y, Y, Z) - r_ * Y;
}

double Generator::drift_adjustment(double t, double y) const {
    return kind_ == GeneratorKind::Linear ? adjustment_(t, y) : 0.0;
}

std::optional<double> Generator::z_lipschitz() const {
    if (kind_ == GeneratorKind::StdDevAbs || kind_ == GeneratorKind::CoCAbs) {
        return std::abs(coefficient_);
    }
    return std::nullopt;
}

bool Generator::needs_positive_price() const {
    if (kind_ == GeneratorKind::PowerBenchmark) return true;
    return kind_ == GeneratorKind::MeanValue && v_->domain_lo() >= 0.0;
}

Generator generator_for(const PrincipleSpec& p) {
    switch (p.kind) {
        case PrincipleKind::Variance: return Generator::variance_flat(p.alpha);
        case PrincipleKind::VarianceDiscounted:
            return Generator::variance_discounted(p.gamma, p.X0, p.r);
        case PrincipleKind::CurrentPriceBenchmark: return Generator::power_benchmark(p.gamma, p.r);
        case PrincipleKind::MeanValue:
            if (!p.v) throw ConfigError("principle.v", "mean-value principle needs a distortion");
            return Generator::mean_value(*p.v, p.r);
        case PrincipleKind::StdDev: return Generator::stddev_abs(p.beta, p.r);
        case PrincipleKind::CostOfCapital: return Generator::coc_abs(p.delta, p.q, p.r);
    }
    throw ConfigError("principle.kind", "no generator");
}

void SolverConfig::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("solver.theta", "must lie in [0, 1]");
    if (!(max_cfl > 0.0)) throw ConfigError("solver.max_cfl", "must be > 0");
}

// --- Solver ----------------------------------------------------------------

namespace {

struct Operator {
    std::vector<double> lower, diag, upper;
    explicit Operator(std::size_t n) : lower(n), diag(n), upper(n) {}
};

/// Advection-diffusion-discount operator on the grid coordinate at time t.
void assemble(const DiffusionModel& model, const Generator& gen, const Grid& grid, double t,
              double rate, Operator& op) {
    const std::size_t n = grid.n_space();
    const double h = grid.spacing();
    const bool log_grid = grid.scale() == SpaceScale::Log;
    const double edge_curvature = log_grid ? 1.0 : 0.0;  // pi_xx = c pi_x  <=>  pi_yy = 0
    for (std::size_t j = 0; j < n; ++j) {
        const double y = grid.node(j);
        const double a = model.drift(t, y) + gen.drift_adjustment(t, y);
        const double b = model.diffusion(t, y);
        double A, D;
        if (log_grid) {
            A = a / y - 0.5 * b * b / (y * y);
            D = 0.5 * b * b / (y * y);
        } else {
            A = a;
            D = 0.5 * b * b;
        }
        if (j == 0) {
            const double v = (A + edge_curvature * D) / h;
            op.lower[j] = 0.0;
            op.diag[j] = -v - rate;
            op.upper[j] = v;
        } else if (j == n - 1) {
            const double v = (A + edge_curvature * D) / h;
            op.lower[j] = -v;
            op.diag[j] = v - rate;
            op.upper[j] = 0.0;
        } else {
            op.lower[j] = -A / (2.0 * h) + D / (h * h);
            op.diag[j] = -2.0 * D / (h * h) - rate;
            op.upper[j] = A / (2.0 * h) + D / (h * h);
        }
    }
}

std::string position(double t, double y) {
    std::ostringstream os;
    os << "(t=" << t << ", y=" << y << ")";
    return os.str();
}

void check_row(const Generator& gen, const Grid& grid, std::size_t i, std::span<const double> row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (!std::isfinite(row[j])) {
            throw NumericalError("non-finite PDE price at " + position(grid.time(i), grid.node(j)));
        }
        if (gen.needs_positive_price() && !(row[j] > 0.0)) {
            throw DomainError(to_string(gen.kind()) + " generator needs a positive price, got " +
                              std::to_string(row[j]) + " at " +
                              position(grid.time(i), grid.node(j)));
        }
    }
}

void check_cfl(const DiffusionModel& model, const Generator& gen, const Grid& grid,
               const SolverConfig& config) {
    const auto lip = gen.z_lipschitz();
    if (!lip || *lip == 0.0) return;
    double speed = 0.0;
    for (std::size_t i = 0; i <= grid.n_time(); ++i) {
        const double t = grid.time(i);
        for (std::size_t j = 0; j < grid.n_space(); ++j) {
            const double y = grid.node(j);
            speed = std::max(speed, std::abs(model.diffusion(t, y)) * grid.coordinate_slope(y));
        }
    }
    speed *= *lip;
    const double cfl = grid.dt() * speed / grid.spacing();
    if (cfl > config.max_cfl) {
        const auto suggested = static_cast<std::size_t>(
            std::ceil((grid.T() - grid.t0()) * speed / (config.max_cfl * grid.spacing())));
        std::ostringstream os;
        os << "explicit |Z| term has CFL number " << cfl << " > " << config.max_cfl
           << "; use n_time >= " << suggested;
        throw ConfigError("grid.n_time", os.str());
    }
}

}  // namespace

std::vector<double> state_derivative(const Grid& grid, std::span<const double> row) {
    const std::size_t n = row.size();
    const double h = grid.spacing();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        double px;
        if (j == 0) px = (row[1] - row[0]) / h;
        else if (j == n - 1) px = (row[n - 1] - row[n - 2]) / h;
        else px = (row[j + 1] - row[j - 1]) / (2.0 * h);
        d[j] = px * grid.coordinate_slope(grid.node(j));
    }
    return d;
}

PriceSurface solve_semilinear(const DiffusionModel& model, const Payoff& payoff,
                              const Generator& generator, const Grid& grid,
                              const SolverConfig& config) {
    if (generator.kind() == GeneratorKind::PowerBenchmark && !payoff.positive()) {
        throw DomainError("PowerBenchmark generator needs a payoff declared positive");
    }
    const auto terminal = evaluate_payoff(payoff, grid.nodes());
    return solve_semilinear(model, terminal, generator, grid, config);
}

PriceSurface solve_semilinear(const DiffusionModel& model, std::span<const double> terminal,
                              const Generator& generator, const Grid& grid,
                              const SolverConfig& config) {
    config.validate();
    if (terminal.size() != grid.n_space()) {
        throw ConfigError("terminal", "terminal row does not match the grid width");
    }
    check_cfl(model, generator, grid, config);

    const bool forward = generator.kind() == GeneratorKind::MeanValue;
    const double rate = forward ? 0.0 : generator.rate();
    const std::size_t n_steps = grid.n_time();
    const std::size_t width = grid.n_space();
    const double dt = grid.dt();

    PriceSurface surface(grid);
    {
        auto last = surface.row(n_steps);
        const double scale = forward ? std::exp(-generator.rate() * grid.T()) : 1.0;
        for (std::size_t j = 0; j < width; ++j) last[j] = terminal[j] * scale;
        check_row(generator, grid, n_steps, last);
    }

    Operator op_old(width), op_new(width);
    std::vector<double> lower(width), diag(width), upper(width), rhs(width), scratch(width);

    assemble(model, generator, grid, grid.time(n_steps), rate, op_old);
    for (std::size_t done = 0, i = n_steps; i-- > 0; ++done) {
        const double t_old = grid.time(i + 1);
        const double t_new = grid.time(i);
        const double theta = done < config.rannacher_steps ? 1.0 : config.theta;
        const auto old = surface.row(i + 1);
        const auto dpi = state_derivative(grid, old);

        assemble(model, generator, grid, t_new, rate, op_new);
        for (std::size_t j = 0; j < width; ++j) {
            double l_old = op_old.diag[j] * old[j];
            if (j > 0) l_old += op_old.lower[j] * old[j - 1];
            if (j + 1 < width) l_old += op_old.upper[j] * old[j + 1];

            const double y = grid.node(j);
            const double Z = model.diffusion(t_old, y) * dpi[j];
            const double g = generator.explicit_part(t_old, y, old[j], Z);

            rhs[j] = old[j] + (1.0 - theta) * dt * l_old + dt * g;
            lower[j] = -theta * dt * op_new.lower[j];
            diag[j] = 1.0 - theta * dt * op_new.diag[j];
            upper[j] = -theta * dt * op_new.upper[j];
        }
        solve_tridiagonal(lower, diag, upper, rhs, scratch);
        auto current = surface.row(i);
        std::copy(rhs.begin(), rhs.end(), current.begin());
        check_row(generator, grid, i, current);
        std::swap(op_old, op_new);
    }

    if (forward && generator.rate() != 0.0) {
        for (std::size_t i = 0; i <= n_steps; ++i) {
            const double growth = std::exp(generator.rate() * grid.time(i));
            for (double& v : surface.row(i)) v *= growth;
        }
    }
    return surface;
}

DavisSolution solve_davis(const DiffusionModel& model, const Payoff& base_payoff,
                          const Payoff& perturbation, const PrincipleSpec& principle,
                          const Grid& grid, const SolverConfig& config) {
    const auto base = evaluate_payoff(base_payoff, grid.nodes());
    const auto extra = evaluate_payoff(perturbation, grid.nodes());
    return solve_davis(model, base, extra, principle, grid, config);
}

DavisSolution solve_davis(const DiffusionModel& model, std::span<const double> base_terminal,
                          std::span<const double> perturbation_terminal,
                          const PrincipleSpec& principle, const Grid& grid,
                          const SolverConfig& config) {
    double gamma, X0, r;
    if (principle.kind == PrincipleKind::VarianceDiscounted) {
        gamma = principle.gamma;
        X0 = principle.X0;
        r = principle.r;
    } else if (principle.kind == PrincipleKind::Variance) {
        gamma = principle.alpha;
        X0 = 1.0;
        r = 0.0;
    } else {
        throw ConfigError("principle.kind", "the Davis price is defined for the variance principle");
    }
    principle.validate();

    PriceSurface base = solve_semilinear(model, base_terminal,
                                         Generator::variance_discounted(gamma, X0, r), grid, config);

    std::vector<std::vector<double>> slopes(grid.n_time() + 1);
    for (std::size_t i = 0; i <= grid.n_time(); ++i) slopes[i] = state_derivative(grid, base.row(i));

    const Grid& g = base.grid();
    auto adjustment = [&slopes, &g, &model, gamma, X0, r](double t, double y) {
        const std::size_t i = g.time_index(t);
        const double slope =
            interpolate_uniform(slopes[i], g.coordinate(0), g.spacing(), g.to_coordinate(y));
        const double b = model.diffusion(t, y);
        return gamma / (X0 * std::exp(r * t)) * b * b * slope;
    };
    PriceSurface davis = solve_semilinear(model, perturbation_terminal,
                                          Generator::linear(adjustment, r), grid, config);
    return {std::move(base), std::move(davis)};
}

std::pair<std::vector<double>, std::vector<double>> extract_slice(const PriceSurface& surface,
                                                                  double t) {
    const std::size_t i = surface.grid().time_index(t);
    const auto row = surface.row(i);
    const auto nodes = surface.grid().nodes();
    return {std::vector<double>(nodes.begin(), nodes.end()), std::vector<double>(row.begin(), row.end())};
}

}  // namespace tcval
