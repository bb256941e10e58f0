#pragma once

namespace dlasso {

/// Standard normal CDF, evaluated through erfc for full double precision in
/// both tails.
double normal_cdf(double x);

/// Two-sided tail mass 2(1 - Phi(|z|)), computed as erfc(|z|/sqrt(2)) to
/// avoid cancellation for large |z|.
double normal_two_sided_p(double z);

/// Inverse standard normal CDF: Acklam's rational approximation polished by
/// one Halley step on erfc, absolute error well below 1e-12 over (0,1).
/// Arguments outside (0,1) raise ArgumentError.
double normal_quantile(double p);

/// Chi-squared quantile via Newton inversion of the regularized lower
/// incomplete gamma function (Wilson-Hilferty starting point).
/// df >= 1, prob in (0,1).
double chi_squared_quantile(int df, double prob);

/// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double gamma_p(double a, double x);

}  // namespace dlasso
