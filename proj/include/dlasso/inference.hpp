#pragma once

#include <string>
#include <vector>

#include "dlasso/debias.hpp"
#include "dlasso/lasso.hpp"
#include "dlasso/noise.hpp"
#include "dlasso/types.hpp"

namespace dlasso {

/// theta_u = theta_n + (1/n) M X' (Y - X theta_n)
Vector debias_estimate(const LassoFit& fit, const DebiasMatrix& M,
                       const RegressionProblem& problem);

/// Debiased estimate bundled with everything inference needs. The diagonal
/// of M Sigma_hat M' is always materialized; submatrices of
/// Q = sigma_hat^2/n * M Sigma_hat M' are computed on demand so the common
/// CI path never forms the full p x p product.
struct DebiasedEstimate {
  Vector theta_n;
  Vector theta_u;
  DebiasMatrix M;
  SampleCovariance sigma_hat_mat;
  double sigma_hat = 0.0;
  int n = 0;
  int p = 0;
  Vector omega_diag;  // diag(M Sigma_hat M')

  double se(int i) const;  // sigma_hat * sqrt(omega_diag[i] / n)

  /// (M Sigma_hat M') restricted to rows/columns R.
  Matrix omega_submatrix(const std::vector<int>& R) const;
  /// Q restricted to R: sigma_hat^2/n * omega_submatrix(R).
  Matrix q_submatrix(const std::vector<int>& R) const;
};

DebiasedEstimate make_debiased_estimate(const LassoFit& fit, DebiasMatrix M,
                                        const RegressionProblem& problem,
                                        const NoiseEstimate& noise,
                                        const Vector* omega_diag_precomputed =
                                            nullptr);

/// Exact error decomposition sqrt(n)(theta_u - theta0) = Z + Delta with
/// Z = M X' W / sqrt(n) and Delta = sqrt(n)(M Sigma_hat - I)(theta0 -
/// theta_n); max_residual is the sup-norm defect of the identity and is a
/// pure floating-point rounding check (simulation context only).
struct DecompositionCheck {
  Vector Z;
  Vector Delta;
  double max_residual = 0.0;
};
DecompositionCheck decomposition_check(const Vector& theta_u,
                                       const Vector& theta_n,
                                       const Vector& theta0, const Vector& W,
                                       const DebiasMatrix& M, const Matrix& X);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Per-coordinate two-sided intervals
///   theta_u_i -+ z_{1-alpha/2} * sigma_hat/sqrt(n) * omega_ii^{1/2}.
/// alpha outside (0,1) raises ArgumentError.
std::vector<Interval> confidence_intervals(const DebiasedEstimate& est,
                                           double alpha);

/// Two-sided p-values 2(1 - Phi(sqrt(n)|theta_u_i| / (sigma_hat
/// omega_ii^{1/2}))). A zero standard error with a nonzero estimate yields
/// p = 0 and sets *degenerate_se (p = 1 when the estimate is zero too).
Vector p_values(const DebiasedEstimate& est, bool* degenerate_se = nullptr);

struct TestDecisions {
  std::vector<bool> reject;       // P_i <= alpha
  std::vector<bool> reject_fwer;  // P_i <= alpha / p (Bonferroni)
};
TestDecisions test_decisions(const Vector& pvals, double alpha);

enum class RegionShape { ellipsoid, box };

/// Simultaneous confidence region over coordinates R.
///   ellipsoid: (x - c)' Q_RR^{-1} (x - c) <= chi2_{k,1-alpha}
///   box:       per-axis Sidak width at level (1-alpha)^{1/k} per axis
struct SimultaneousRegion {
  std::vector<int> R;
  RegionShape shape = RegionShape::ellipsoid;
  Vector center;          // theta_u restricted to R
  Matrix q_rr;            // Q restricted to R
  double chi2_bound = 0;  // ellipsoid: chi-squared quantile
  Vector box_halfwidth;   // box: per-axis half widths

  bool contains(const Vector& x) const;
};

SimultaneousRegion simultaneous_region(const DebiasedEstimate& est,
                                       const std::vector<int>& R, double alpha,
                                       RegionShape shape);

struct CoordinateInference {
  int index = 0;  // 1-based in reports
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double p_value = 1.0;
  double p_adj = 1.0;  // min(1, p * p_value)
  bool reject = false;
  bool reject_fwer = false;
};

struct InferenceReport {
  double alpha = 0.05;
  std::string method;  // "jm" | "nodewise" | "nongaussian"
  double sigma_hat = 0.0;
  std::vector<CoordinateInference> coords;
  bool degenerate_se = false;
};

/// Assembles the per-coordinate report. names, when provided, must have
/// length p; otherwise coordinates are named x1..xp.
InferenceReport build_report(const DebiasedEstimate& est, double alpha,
                             const std::string& method,
                             const std::vector<std::string>& names = {});

}  // namespace dlasso
