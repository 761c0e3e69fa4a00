#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcval/model.hpp"
#include "tcval/principles.hpp"
#include "tcval/surface.hpp"

namespace tcval {

enum class GeneratorKind {
    VarianceFlat,
    VarianceDiscounted,
    PowerBenchmark,
    MeanValue,
    StdDevAbs,
    CoCAbs,
    Linear
};

std::string to_string(GeneratorKind kind);

/// Nonlinearity g(t, y, Y, Z) of
///     pi_t + a pi_y + 1/2 b^2 pi_yy + g(t, y, pi, b pi_y) = 0.
///
/// Every generator splits into a discount part -r Y, solved implicitly, and
/// a remainder evaluated explicitly at the previous time level. The Linear
/// kind instead carries a drift adjustment m(t, y), g = m pi_y, which the
/// solver folds into the implicit advection.
class Generator {
public:
    static Generator variance_flat(double alpha);
    static Generator variance_discounted(double gamma, double X0, double r);
    static Generator power_benchmark(double gamma, double r);
    /// Acts on the forward price pi / exp(r t).
    static Generator mean_value(Distortion v, double r);
    static Generator stddev_abs(double beta, double r);
    /// delta k |Z| - r Y with k = inverse normal CDF at q.
    static Generator coc_abs(double delta, double q, double r);
    static Generator linear(Coefficient drift_adjustment, double r);

    GeneratorKind kind() const noexcept { return kind_; }
    double rate() const noexcept { return r_; }

    /// Full g(t, y, Y, Z). For Linear, Z is b pi_y and the adjustment is
    /// divided by b, so it needs b(t, y) > 0; the solver never calls this.
    double evaluate(double t, double y, double Y, double Z, double b = 1.0) const;
    /// g + r Y: the explicitly treated part (zero for Linear).
    double explicit_part(double t, double y, double Y, double Z) const;
    /// Extra advection in state units for the Linear kind, 0 otherwise.
    double drift_adjustment(double t, double y) const;
    /// sup |dg/dZ| for generators with a |Z| kink.
    std::optional<double> z_lipschitz() const;
    /// True if Y must stay strictly positive (PowerBenchmark, power MeanValue).
    bool needs_positive_price() const;
    const std::optional<Distortion>& distortion() const noexcept { return v_; }

private:
    GeneratorKind kind_ = GeneratorKind::Linear;
    double coefficient_ = 0.0;  // alpha, gamma, beta or delta*k depending on kind
    double X0_ = 1.0;
    double r_ = 0.0;
    std::optional<Distortion> v_;
    Coefficient adjustment_;
};

/// Generator that is the continuous-time limit of the iterated principle.
Generator generator_for(const PrincipleSpec& principle);

struct SolverConfig {
    double theta = 0.5;                 // 1/2 = Crank-Nicolson on the linear part
    double max_cfl = 1.0;               // bound for dt sup|dg/dZ| b / dy with |Z| generators
    std::size_t rannacher_steps = 2;    // leading fully implicit steps, damp payoff kinks

    void validate() const;
};

/// Solves the semi-linear terminal-value problem backwards from the payoff.
///
/// Each step solves one tridiagonal system for the advection-diffusion-
/// discount part with theta weighting; the rest of g is evaluated at the
/// previous time level with Z = b * (central difference of pi). Both edges
/// impose pi_yy = 0.
PriceSurface solve_semilinear(const DiffusionModel& model, const Payoff& payoff,
                              const Generator& generator, const Grid& grid,
                              const SolverConfig& config = {});

/// Same solve from an arbitrary terminal row at grid.T().
PriceSurface solve_semilinear(const DiffusionModel& model, std::span<const double> terminal,
                              const Generator& generator, const Grid& grid,
                              const SolverConfig& config = {});

struct DavisSolution {
    PriceSurface base;   // nonlinear discounted-variance price of the base claim
    PriceSurface davis;  // marginal price of the perturbation claim
};

/// Marginal (Davis) price of a small extra claim on top of a portfolio valued
/// by the discounted variance principle. Solves the base PDE first, then the
/// linear PDE with drift a + gamma / (X0 e^{rt}) b^2 pi_y, diffusion b^2/2,
/// discount -r and terminal value g_claim.
DavisSolution solve_davis(const DiffusionModel& model, const Payoff& base_payoff,
                          const Payoff& perturbation, const PrincipleSpec& principle,
                          const Grid& grid, const SolverConfig& config = {});

DavisSolution solve_davis(const DiffusionModel& model, std::span<const double> base_terminal,
                          std::span<const double> perturbation_terminal,
                          const PrincipleSpec& principle, const Grid& grid,
                          const SolverConfig& config = {});

/// Row of the surface at time t, as (nodes, prices).
std::pair<std::vector<double>, std::vector<double>> extract_slice(const PriceSurface& surface,
                                                                  double t);

/// First derivative pi_y of one row: central differences inside, one-sided
/// at the edges.
std::vector<double> state_derivative(const Grid& grid, std::span<const double> row);

}  // namespace tcval
