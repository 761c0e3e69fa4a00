#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tcval/lattice.hpp"
#include "tcval/model.hpp"
#include "tcval/pde.hpp"
#include "tcval/principles.hpp"
#include "tcval/surface.hpp"

namespace tcval {

enum class ReferenceKind { ClosedForm, PDEFine };
enum class ReportStatus { Ok, Inconclusive, Exact, Insufficient };
enum class EngineKind { Lattice, PDE };

std::string to_string(ReferenceKind kind);
std::string to_string(ReportStatus status);
std::string to_string(EngineKind kind);
ReferenceKind reference_kind_from_string(const std::string& name);
EngineKind engine_kind_from_string(const std::string& name);

/// One pricing problem studied under grid refinement. `grid.n_space` is
/// used at the coarsest level; `grid.n_time` is replaced by each level.
struct ConvergenceCase {
    std::string id = "case";
    DiffusionModel model;
    Payoff payoff;
    PrincipleSpec principle;
    GridSpec grid;
    EngineKind engine = EngineKind::Lattice;
    TreeKind tree = TreeKind::Binomial;
    SolverConfig solver{};
    /// Scale the number of space intervals with n_time, so the O(n dy^2)
    /// interpolation error of the lattice shrinks like dt.
    bool refine_space = false;
    unsigned threads = 1;
};

struct ConvergenceReport {
    std::string case_id;
    ReferenceKind reference = ReferenceKind::ClosedForm;
    std::vector<std::size_t> n_time;
    std::vector<double> dt_sequence;
    /// Sup-norm error over the central half of the space window at t0.
    std::vector<double> errors;
    /// Signed error at (t0, y_center).
    std::vector<double> headline_errors;
    std::vector<double> headline_prices;
    double reference_headline = 0.0;
    /// Least-squares slope of log(error) against log(dt); NaN unless Ok or
    /// Inconclusive.
    double fitted_order;
    ReportStatus status = ReportStatus::Insufficient;
    std::vector<std::string> notes;

    /// errors[i] / errors[i + 1].
    std::vector<double> error_ratios() const;
    std::string to_json() const;
    /// Columns case_id, dt, error, fitted_order, reference; with header.
    std::string to_csv() const;
};

/// Errors at or below this multiple of the reference magnitude count as
/// the roundoff floor.
inline constexpr double kExactFloor = 1e-10;

/// Least-squares slope of log(y) against log(x).
double fitted_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Refines the case over `n_time_sequence` (each entry twice the previous)
/// and measures the t0 error against the closed form or a PDE solve with
/// a quarter of the finest dt and half of the finest dy.
ConvergenceReport converge_to_limit(const ConvergenceCase& c,
                                    const std::vector<std::size_t>& n_time_sequence,
                                    ReferenceKind reference);

/// converge_to_limit restricted to the lattice engine.
ConvergenceReport converge_lattice_to_limit(const ConvergenceCase& c,
                                            const std::vector<std::size_t>& n_time_sequence,
                                            ReferenceKind reference);

/// Quadrinomial cost-of-capital lattice against the closed-form std-dev
/// price with beta = delta * inverse normal CDF at q. The case principle
/// supplies r; payoff must be monotone.
ConvergenceReport coc_equals_stddev_limit(const ConvergenceCase& c, double delta, double q,
                                          const std::vector<std::size_t>& n_time_sequence);

struct DavisReport {
    std::string case_id;
    std::vector<double> eps;
    /// Sup over the central window at t0 of |difference quotient - Davis price|.
    std::vector<double> gaps;
    std::vector<double> headline_quotients;
    double davis_headline = 0.0;
    double fitted_order;
    ReportStatus status = ReportStatus::Insufficient;
    std::vector<std::string> notes;

    std::string to_json() const;
    /// Columns case_id, eps, gap, fitted_order.
    std::string to_csv() const;
};

/// Compares (pi[f + eps g] - pi[f]) / eps from the nonlinear PDE with the
/// Davis price of g, for decreasing eps. Uses c.grid as given and a
/// variance-type case principle.
DavisReport davis_is_marginal_price(const ConvergenceCase& c, const Payoff& perturbation,
                                    const std::vector<double>& eps_sequence);

}  // namespace tcval
