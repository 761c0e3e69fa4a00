#include "tcval/surface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcval/errors.hpp"

namespace tcval {

Grid::Grid(GridSpec spec, SpaceScale scale, double x_min, double x_max)
    : spec_(spec), scale_(scale), x_min_(x_min) {
    if (spec_.n_time < 1) throw ConfigError("grid.n_time", "must be >= 1");
    if (spec_.n_space < 3) throw ConfigError("grid.n_space", "must be >= 3");
    if (!(spec_.T > spec_.t0)) throw ConfigError("grid.T", "horizon must exceed t0");
    if (!(x_max > x_min)) throw ConfigError("grid", "empty space domain");
    dt_ = (spec_.T - spec_.t0) / static_cast<double>(spec_.n_time);
    dx_ = (x_max - x_min) / static_cast<double>(spec_.n_space - 1);
    nodes_.resize(spec_.n_space);
    for (std::size_t j = 0; j < spec_.n_space; ++j) nodes_[j] = to_state(coordinate(j));
}

double Grid::to_coordinate(double y) const {
    return scale_ == SpaceScale::Linear ? y : std::log(y);
}

double Grid::to_state(double x) const {
    return scale_ == SpaceScale::Linear ? x : std::exp(x);
}

double Grid::coordinate_slope(double y) const {
    return scale_ == SpaceScale::Linear ? 1.0 : 1.0 / y;
}

double Grid::interpolate(std::span<const double> row, double y) const {
    const std::size_t n = nodes_.size();
    std::size_t j = 0;
    if (scale_ == SpaceScale::Linear || y > 0.0) {
        const double s = std::floor((to_coordinate(y) - x_min_) / dx_);
        j = static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(n - 2)));
    }
    const double w = (y - nodes_[j]) / (nodes_[j + 1] - nodes_[j]);
    return row[j] + w * (row[j + 1] - row[j]);
}

std::size_t Grid::time_index(double t) const {
    const double s = (t - spec_.t0) / dt_;
    const double i = std::nearbyint(s);
    if (i < 0.0 || i > static_cast<double>(spec_.n_time) ||
        std::abs(time(static_cast<std::size_t>(i)) - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "time " << t << " is not on the grid";
        throw LookupError(os.str());
    }
    return static_cast<std::size_t>(i);
}

Grid Grid::prefix(std::size_t n_steps) const {
    if (n_steps < 1 || n_steps > spec_.n_time) {
        throw ConfigError("grid.n_time", "prefix length out of range");
    }
    Grid g = *this;
    g.spec_.n_time = n_steps;
    g.spec_.T = time(n_steps);
    return g;
}

std::pair<std::size_t, std::size_t> Grid::central_window(double fraction) const {
    const double width = dx_ * static_cast<double>(nodes_.size() - 1);
    const double margin = 0.5 * (1.0 - fraction) * width;
    const double lo = x_min_ + margin;
    const double hi = x_min_ + width - margin;
    std::size_t first = nodes_.size(), last = 0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const double x = coordinate(j);
        if (x >= lo - 1e-12 * dx_ && x <= hi + 1e-12 * dx_) {
            first = std::min(first, j);
            last = j + 1;
        }
    }
    if (first >= last) {
        const std::size_t mid = nodes_.size() / 2;
        return {mid, mid + 1};
    }
    return {first, last};
}

Grid build_grid(const DiffusionModel& model, const GridSpec& spec) {
    if (spec.n_time < 1) throw ConfigError("grid.n_time", "must be >= 1");
    if (spec.n_space < 3) throw ConfigError("grid.n_space", "must be >= 3");
    if (!(spec.n_stddevs > 0.0)) throw ConfigError("grid.n_stddevs", "must be > 0");
    if (!(spec.T > spec.t0)) throw ConfigError("grid.T", "degenerate horizon: T must exceed t0");
    if (!std::isfinite(spec.y_center)) throw ConfigError("grid.y_center", "must be finite");

    const bool log_scale = model.kind() == ModelKind::GBM;
    if (log_scale && !(spec.y_center > 0.0)) {
        throw ConfigError("grid.y_center", "GBM state must be positive");
    }
    const double scale = model.terminal_scale(spec.t0, spec.y_center, spec.T);
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ConfigError("model.diffusion", "zero terminal spread gives a degenerate grid");
    }
    const double half = spec.n_stddevs * scale;
    const double center = log_scale ? std::log(spec.y_center) : spec.y_center;
    return Grid(spec, log_scale ? SpaceScale::Log : SpaceScale::Linear, center - half,
                center + half);
}

// --- PriceSurface ----------------------------------------------------------

PriceSurface::PriceSurface(Grid grid)
    : grid_(std::move(grid)),
      width_(grid_.n_space()),
      values_((grid_.n_time() + 1) * grid_.n_space(), 0.0) {}

std::span<const double> PriceSurface::row(std::size_t i) const {
    return {values_.data() + i * width_, width_};
}

std::span<double> PriceSurface::row(std::size_t i) {
    return {values_.data() + i * width_, width_};
}

double interpolate_uniform(std::span<const double> values, double x0, double dx, double x) {
    const std::size_t n = values.size();
    const double s = (x - x0) / dx;
    double fl = std::floor(s);
    fl = std::clamp(fl, 0.0, static_cast<double>(n - 2));
    const auto j = static_cast<std::size_t>(fl);
    const double w = s - fl;
    return values[j] + w * (values[j + 1] - values[j]);
}

double PriceSurface::interpolate(std::size_t i, double y) const {
    return grid_.interpolate(row(i), y);
}

double PriceSurface::headline() const { return interpolate(0, grid_.spec().y_center); }

void PriceSurface::check_finite() const {
    for (std::size_t i = 0; i <= grid_.n_time(); ++i) {
        for (std::size_t j = 0; j < width_; ++j) {
            if (!std::isfinite(at(i, j))) {
                std::ostringstream os;
                os << "non-finite price at (t=" << grid_.time(i) << ", y=" << grid_.node(j) << ")";
                throw NumericalError(os.str());
            }
        }
    }
}

}  // namespace tcval
