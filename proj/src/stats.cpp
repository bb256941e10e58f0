#include "dlasso/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dlasso/errors.hpp"

namespace dlasso {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation to the inverse normal CDF
// (relative error < 1.15e-9 before refinement).
double acklam_quantile(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
            1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("normal_quantile: probability must lie in (0,1)");
  }
  double x = acklam_quantile(p);
  // One Halley step against the erfc-based CDF pushes the absolute error to
  // the order of the CDF's own rounding (~1e-15).
  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  for (int iter = 0; iter < 2; ++iter) {
    const double err = normal_cdf(x) - p;
    if (err == 0.0) break;
    const double u = err * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

// Regularized lower incomplete gamma by power series (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by Lentz continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw ArgumentError("gamma_p: invalid arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_squared_quantile(int df, double prob) {
  if (df < 1) throw ArgumentError("chi_squared_quantile: df must be >= 1");
  if (!(prob > 0.0 && prob < 1.0)) {
    throw ArgumentError("chi_squared_quantile: probability must lie in (0,1)");
  }
  const double a = 0.5 * df;
  // Wilson-Hilferty starting point.
  const double z = normal_quantile(prob);
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  double x = df * t * t * t;
  if (!(x > 0.0)) x = 0.5 * df;  // small-df low quantile fallback
  for (int iter = 0; iter < 100; ++iter) {
    const double f = gamma_p(a, 0.5 * x) - prob;
    // d/dx P(a, x/2) = 0.5 * (x/2)^(a-1) e^{-x/2} / Gamma(a)
    const double log_pdf =
        (a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a);
    const double fp = 0.5 * std::exp(log_pdf);
    if (fp <= 0.0) break;
    double step = f / fp;
    if (step > 0.5 * x) step = 0.5 * x;  // keep the iterate positive
    x -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + x)) break;
  }
  return x;
}

}  // namespace dlasso
