#pragma once

#include <span>
#include <string>

#include "tcval/model.hpp"
#include "tcval/principles.hpp"
#include "tcval/surface.hpp"

namespace tcval {

/// Four-branch tree matching mean, variance and the q-quantile of the
/// diffusion increment: outer nodes at +/- k b sqrt(dt) with probability
/// 1 - q each, inner nodes at +/- l b sqrt(dt) with probability q - 1/2.
struct QuadrinomialCalibration {
    double q;
    double k;
    double l;

    double outer_probability() const noexcept { return 1.0 - q; }
    double inner_probability() const noexcept { return 0.5 - (1.0 - q); }
};

QuadrinomialCalibration calibrate_quadrinomial(double q);

struct LatticeStep {
    DiscreteDistribution children;  // next-period states
    double dt;
};

LatticeStep binomial_children(const DiffusionModel& model, double t, double y, double dt);
LatticeStep quadrinomial_children(const DiffusionModel& model, double t, double y, double dt,
                                  const QuadrinomialCalibration& calib);

enum class TreeKind { Binomial, Quadrinomial };

std::string to_string(TreeKind kind);
TreeKind tree_kind_from_string(const std::string& name);

/// Time-consistent backward iteration of a one-step principle on a grid.
///
/// Child states off the grid are priced by linear interpolation of the next
/// row in the grid coordinate, with the edge gradient extrapolated outside
/// the domain. A child more than two spacings outside the domain is counted
/// and reported as a surface warning, as is a node spacing wider than the
/// child spread at (t0, y_center). Rows are computed node-parallel with
/// `threads` workers; the result does not depend on the worker count.
PriceSurface backward_induct(const DiffusionModel& model, const Payoff& payoff,
                             const PrincipleSpec& principle, const Grid& grid, TreeKind tree,
                             unsigned threads = 1);

/// Same iteration starting from an arbitrary terminal row at grid.T().
PriceSurface backward_induct(const DiffusionModel& model, std::span<const double> terminal,
                             const PrincipleSpec& principle, const Grid& grid, TreeKind tree,
                             unsigned threads = 1);

}  // namespace tcval
