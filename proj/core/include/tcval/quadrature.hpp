#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tcval {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the standard normal density:
/// E[h(Z)] ~ sum_i w_i h(x_i), with sum_i w_i = 1.
const QuadratureRule& gauss_hermite_normal(std::size_t n);

/// n-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(std::size_t n);

/// E[h(Z)] for Z ~ N(0, 1).
///
/// Without breakpoints the Gauss-Hermite order is doubled from 16 until two
/// successive values agree to 1e-10 relative (to the integral of |h|). With
/// breakpoints (kinks of h) the Gaussian core is truncated where the
/// integrand is negligible and integrated by composite Gauss-Legendre panels
/// between the breakpoints, doubling the panel count to the same tolerance.
double normal_expectation(const std::function<double(double)>& h,
                          std::span<const double> breakpoints = {});

}  // namespace tcval
