#include "tcval/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "tcval/errors.hpp"
#include "tcval/normal.hpp"

namespace tcval {

QuadrinomialCalibration calibrate_quadrinomial(double q) {
    if (!(q > 0.5 && q < 1.0)) {
        throw CalibrationError("calibrate_quadrinomial: q must lie in (0.5, 1)");
    }
    const double k = inverse_normal_cdf(q);
    const double tail = 1.0 - q;
    const double l2 = (0.5 - tail * k * k) / (0.5 - tail);
    if (!(l2 > 0.0)) {
        std::ostringstream os;
        os << "calibrate_quadrinomial: q = " << q << " gives l^2 = " << l2 << " <= 0";
        throw CalibrationError(os.str());
    }
    return {q, k, std::sqrt(l2)};
}

LatticeStep binomial_children(const DiffusionModel& model, double t, double y, double dt) {
    if (!(dt > 0.0)) throw DomainError("binomial_children: dt must be > 0");
    const double centre = y + model.drift(t, y) * dt;
    const double spread = model.diffusion(t, y) * std::sqrt(dt);
    return {DiscreteDistribution({{centre + spread, 0.5}, {centre - spread, 0.5}}), dt};
}

LatticeStep quadrinomial_children(const DiffusionModel& model, double t, double y, double dt,
                                  const QuadrinomialCalibration& calib) {
    if (!(dt > 0.0)) throw DomainError("quadrinomial_children: dt must be > 0");
    const double centre = y + model.drift(t, y) * dt;
    const double s = model.diffusion(t, y) * std::sqrt(dt);
    const double po = calib.outer_probability();
    const double pi = calib.inner_probability();
    return {DiscreteDistribution({{centre + calib.k * s, po},
                                  {centre + calib.l * s, pi},
                                  {centre - calib.l * s, pi},
                                  {centre - calib.k * s, po}}),
            dt};
}

std::string to_string(TreeKind kind) {
    return kind == TreeKind::Binomial ? "binomial" : "quadrinomial";
}

TreeKind tree_kind_from_string(const std::string& name) {
    if (name == "binomial") return TreeKind::Binomial;
    if (name == "quadrinomial") return TreeKind::Quadrinomial;
    throw ConfigError("tree", "unknown tree kind '" + name + "'");
}

PriceSurface backward_induct(const DiffusionModel& model, const Payoff& payoff,
                             const PrincipleSpec& principle, const Grid& grid, TreeKind tree,
                             unsigned threads) {
    const auto terminal = evaluate_payoff(payoff, grid.nodes());
    return backward_induct(model, terminal, principle, grid, tree, threads);
}

PriceSurface backward_induct(const DiffusionModel& model, std::span<const double> terminal,
                             const PrincipleSpec& principle, const Grid& grid, TreeKind tree,
                             unsigned threads) {
    principle.validate();
    if (principle.kind == PrincipleKind::CostOfCapital && tree != TreeKind::Quadrinomial) {
        throw ConfigError("tree", "the cost-of-capital principle needs the quadrinomial tree");
    }
    if (terminal.size() != grid.n_space()) {
        throw ConfigError("terminal", "terminal row does not match the grid width");
    }
    const QuadrinomialCalibration calib =
        tree == TreeKind::Quadrinomial ? calibrate_quadrinomial(principle.q)
                                       : QuadrinomialCalibration{0.75, 0.0, 0.0};

    PriceSurface surface(grid);
    const std::size_t n = grid.n_time();
    const std::size_t width = grid.n_space();
    std::copy(terminal.begin(), terminal.end(), surface.row(n).begin());

    const double x0 = grid.coordinate(0);
    const double dx = grid.spacing();
    const double x_lo = x0 - 2.0 * dx;
    const double x_hi = grid.coordinate(width - 1) + 2.0 * dx;
    const bool log_grid = grid.scale() == SpaceScale::Log;
    const double dt = grid.dt();

    std::size_t escapes = 0;
    std::vector<std::size_t> escapes_by_worker(std::max(1u, threads), 0);

    for (std::size_t step = n; step-- > 0;) {
        const double t = grid.time(step);
        const auto next = surface.row(step + 1);
        auto current = surface.row(step);
        std::fill(escapes_by_worker.begin(), escapes_by_worker.end(), 0);
        const std::size_t chunk = (width + escapes_by_worker.size() - 1) / escapes_by_worker.size();

        detail::parallel_for(width, threads, [&](std::size_t begin, std::size_t end) {
            std::size_t& escaped = escapes_by_worker[begin / std::max<std::size_t>(chunk, 1)];
            for (std::size_t j = begin; j < end; ++j) {
                const double y = grid.node(j);
                const LatticeStep children = tree == TreeKind::Binomial
                                                 ? binomial_children(model, t, y, dt)
                                                 : quadrinomial_children(model, t, y, dt, calib);
                const DiscreteDistribution prices = children.children.map([&](double child) {
                    if (log_grid && !(child > 0.0)) {
                        std::ostringstream os;
                        os << "child state " << child << " from (t=" << t << ", y=" << y
                           << ") is not positive on a log grid";
                        throw DomainError(os.str());
                    }
                    const double x = grid.to_coordinate(child);
                    if (x < x_lo || x > x_hi) ++escaped;
                    return grid.interpolate(next, child);
                });
                double value;
                try {
                    value = apply_step(principle, prices, t, dt);
                } catch (const DomainError& e) {
                    std::ostringstream os;
                    os << e.what() << " at (t=" << t << ", y=" << y << ")";
                    throw DomainError(os.str());
                }
                if (!std::isfinite(value)) {
                    std::ostringstream os;
                    os << "non-finite lattice price at (t=" << t << ", y=" << y << ")";
                    throw NumericalError(os.str());
                }
                current[j] = value;
            }
        });
        for (std::size_t e : escapes_by_worker) escapes += e;
    }

    if (escapes > 0) {
        std::ostringstream os;
        os << "domain-too-narrow: " << escapes
           << " child states fell more than 2 node spacings outside the grid";
        surface.add_warning(os.str());
    }

    // Children closer than one node spacing see the interpolant's kinks at
    // every step, which biases convex rows by O(dx / sqrt(dt)) overall.
    const double yc = grid.spec().y_center;
    const LatticeStep probe = tree == TreeKind::Binomial
                                  ? binomial_children(model, grid.t0(), yc, dt)
                                  : quadrinomial_children(model, grid.t0(), yc, dt, calib);
    const double centre = grid.to_coordinate(probe.children.mean());
    double spread = std::numeric_limits<double>::infinity();
    for (const auto& o : probe.children.outcomes()) {
        if (log_grid && !(o.value > 0.0)) continue;
        spread = std::min(spread, std::abs(grid.to_coordinate(o.value) - centre));
    }
    if (spread > 0.0 && dx > spread) {
        std::ostringstream os;
        os << "grid-coarser-than-tree: node spacing " << dx << " exceeds the child spread "
           << spread << " at (t0, y_center); increase n_space for nonlinear payoffs";
        surface.add_warning(os.str());
    }
    return surface;
}

}  // namespace tcval
