#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tcval/model.hpp"

namespace tcval {

struct GridSpec {
    double t0 = 0.0;
    double T = 1.0;
    std::size_t n_time = 100;
    double y_center = 0.0;
    std::size_t n_space = 201;
    double n_stddevs = 6.0;
};

/// Spacing of the space nodes. Log grids are uniform in ln(y) and are used
/// for GBM so the diffusion term stays well-conditioned near zero.
enum class SpaceScale { Linear, Log };

/// Rectangular time-space grid. Nodes are uniform in the computational
/// coordinate x (x = y on linear grids, x = ln y on log grids).
class Grid {
public:
    Grid(GridSpec spec, SpaceScale scale, double x_min, double x_max);

    const GridSpec& spec() const noexcept { return spec_; }
    double t0() const noexcept { return spec_.t0; }
    double T() const noexcept { return time(spec_.n_time); }
    std::size_t n_time() const noexcept { return spec_.n_time; }
    std::size_t n_space() const noexcept { return nodes_.size(); }
    double dt() const noexcept { return dt_; }
    double time(std::size_t i) const noexcept { return spec_.t0 + static_cast<double>(i) * dt_; }

    SpaceScale scale() const noexcept { return scale_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double node(std::size_t j) const noexcept { return nodes_[j]; }
    double coordinate(std::size_t j) const noexcept {
        return x_min_ + static_cast<double>(j) * dx_;
    }
    double spacing() const noexcept { return dx_; }
    double to_coordinate(double y) const;
    double to_state(double x) const;
    /// dx/dy at state y.
    double coordinate_slope(double y) const;

    /// Piecewise-linear interpolation of a row in the state y. The segment
    /// is located in the computational coordinate; beyond the ends the edge
    /// segment is extended. Linear functions of y are reproduced exactly.
    double interpolate(std::span<const double> row, double y) const;

    /// Index of time t; throws LookupError when t is not on the grid.
    std::size_t time_index(double t) const;

    /// The grid restricted to [t0, t0 + n_steps * dt], same dt and nodes.
    Grid prefix(std::size_t n_steps) const;

    /// Node index range [first, last) covering the central `fraction` of the
    /// space domain.
    std::pair<std::size_t, std::size_t> central_window(double fraction = 0.5) const;

private:
    GridSpec spec_;
    SpaceScale scale_;
    double x_min_;
    double dx_;
    double dt_;
    std::vector<double> nodes_;
};

/// Grid spanning y_center +/- n_stddevs * (terminal std-dev scale).
/// GBM grids are log-uniform and so always strictly positive.
Grid build_grid(const DiffusionModel& model, const GridSpec& spec);

/// pi(t_i, y_j) on a Grid, indexed [time][space].
class PriceSurface {
public:
    explicit PriceSurface(Grid grid);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> row(std::size_t i) const;
    std::span<double> row(std::size_t i);
    double at(std::size_t i, std::size_t j) const { return values_[i * width_ + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * width_ + j]; }

    /// Piecewise-linear value on row i at state y (see Grid::interpolate).
    double interpolate(std::size_t i, double y) const;
    /// Value at (t0, y_center).
    double headline() const;

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    /// Throws NumericalError naming the first non-finite (t_i, y_j).
    void check_finite() const;

private:
    Grid grid_;
    std::size_t width_;
    std::vector<double> values_;
    std::vector<std::string> warnings_;
};

/// Linear interpolation of `values` given on a uniform coordinate grid
/// starting at x0 with spacing dx; beyond the ends the edge segment is
/// extended.
double interpolate_uniform(std::span<const double> values, double x0, double dx, double x);

}  // namespace tcval
