#pragma once

namespace tcval {

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of the standard normal CDF on (0, 1). Acklam's rational
/// approximation followed by one Halley step; absolute error near 1e-15.
double inverse_normal_cdf(double p);

}  // namespace tcval
