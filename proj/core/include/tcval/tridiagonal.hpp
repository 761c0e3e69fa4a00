#pragma once

#include <span>

namespace tcval {

/// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored. Overwrites rhs with the solution and
/// uses `scratch` (size n) as workspace. No pivoting: the caller guarantees
/// diagonal dominance.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch);

}  // namespace tcval
