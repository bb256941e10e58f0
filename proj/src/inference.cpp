#include "dlasso/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "dlasso/errors.hpp"
#include "dlasso/stats.hpp"

namespace dlasso {

Vector debias_estimate(const LassoFit& fit, const DebiasMatrix& M,
                       const RegressionProblem& problem) {
  const int p = problem.p();
  if (fit.theta_hat.size() != p || M.p() != p) {
    throw DimensionError("debias_estimate: shape mismatch");
  }
  const double n = static_cast<double>(problem.n());
  const Vector residual = problem.Y - problem.X * fit.theta_hat;
  return fit.theta_hat + M.M * (problem.X.transpose() * residual) / n;
}

double DebiasedEstimate::se(int i) const {
  return sigma_hat * std::sqrt(std::max(omega_diag[i], 0.0) /
                               static_cast<double>(n));
}

Matrix DebiasedEstimate::omega_submatrix(const std::vector<int>& R) const {
  const int k = static_cast<int>(R.size());
  Matrix m_r(k, p);
  for (int a = 0; a < k; ++a) {
    if (R[a] < 0 || R[a] >= p) {
      throw ArgumentError("omega_submatrix: index out of range");
    }
    m_r.row(a) = M.M.row(R[a]);
  }
  return m_r * sigma_hat_mat.sigma_hat_matrix * m_r.transpose();
}

Matrix DebiasedEstimate::q_submatrix(const std::vector<int>& R) const {
  return (sigma_hat * sigma_hat / static_cast<double>(n)) *
         omega_submatrix(R);
}

DebiasedEstimate make_debiased_estimate(const LassoFit& fit, DebiasMatrix M,
                                        const RegressionProblem& problem,
                                        const NoiseEstimate& noise,
                                        const Vector* omega_diag_precomputed) {
  DebiasedEstimate est;
  est.n = problem.n();
  est.p = problem.p();
  est.theta_n = fit.theta_hat;
  est.theta_u = debias_estimate(fit, M, problem);
  est.sigma_hat_mat = sample_covariance(problem.X);
  est.sigma_hat = noise.sigma_hat;
  if (!(est.sigma_hat > 0.0)) {
    throw ArgumentError("make_debiased_estimate: sigma_hat must be positive");
  }
  if (omega_diag_precomputed) {
    if (omega_diag_precomputed->size() != est.p) {
      throw DimensionError("make_debiased_estimate: omega_diag length");
    }
    est.omega_diag = *omega_diag_precomputed;
  } else {
    est.omega_diag = (M.M * est.sigma_hat_mat.sigma_hat_matrix)
                         .cwiseProduct(M.M)
                         .rowwise()
                         .sum();
  }
  est.M = std::move(M);
  return est;
}

DecompositionCheck decomposition_check(const Vector& theta_u,
                                       const Vector& theta_n,
                                       const Vector& theta0, const Vector& W,
                                       const DebiasMatrix& M,
                                       const Matrix& X) {
  const int p = static_cast<int>(theta0.size());
  if (theta_u.size() != p || theta_n.size() != p || M.p() != p ||
      X.cols() != p || W.size() != X.rows()) {
    throw DimensionError("decomposition_check: shape mismatch");
  }
  const double n = static_cast<double>(X.rows());
  const double root_n = std::sqrt(n);

  DecompositionCheck out;
  out.Z = M.M * (X.transpose() * W) / root_n;
  const Matrix sigma_hat = X.transpose() * X / n;
  out.Delta = root_n * ((M.M * sigma_hat) * (theta0 - theta_n) -
                        (theta0 - theta_n));
  out.max_residual = (root_n * (theta_u - theta0) - out.Z - out.Delta)
                         .lpNorm<Eigen::Infinity>();
  return out;
}

std::vector<Interval> confidence_intervals(const DebiasedEstimate& est,
                                           double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("confidence_intervals: alpha must lie in (0,1)");
  }
  const double z = normal_quantile(1.0 - alpha / 2.0);
  std::vector<Interval> out(est.p);
  for (int i = 0; i < est.p; ++i) {
    const double delta = z * est.se(i);
    out[i] = {est.theta_u[i] - delta, est.theta_u[i] + delta};
  }
  return out;
}

Vector p_values(const DebiasedEstimate& est, bool* degenerate_se) {
  if (degenerate_se) *degenerate_se = false;
  Vector p(est.p);
  const double root_n = std::sqrt(static_cast<double>(est.n));
  for (int i = 0; i < est.p; ++i) {
    const double se_scale = est.sigma_hat * std::sqrt(std::max(
                                est.omega_diag[i], 0.0));
    if (se_scale <= 0.0) {
      if (est.theta_u[i] != 0.0) {
        p[i] = 0.0;
        if (degenerate_se) *degenerate_se = true;
      } else {
        p[i] = 1.0;
      }
      continue;
    }
    const double z = root_n * std::abs(est.theta_u[i]) / se_scale;
    p[i] = normal_two_sided_p(z);
  }
  return p;
}

TestDecisions test_decisions(const Vector& pvals, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("test_decisions: alpha must lie in (0,1)");
  }
  const int p = static_cast<int>(pvals.size());
  TestDecisions out;
  out.reject.resize(p);
  out.reject_fwer.resize(p);
  const double fwer_cut = alpha / p;
  for (int i = 0; i < p; ++i) {
    out.reject[i] = pvals[i] <= alpha;
    out.reject_fwer[i] = pvals[i] <= fwer_cut;
  }
  return out;
}

bool SimultaneousRegion::contains(const Vector& x) const {
  const int k = static_cast<int>(R.size());
  if (x.size() != k) {
    throw DimensionError("SimultaneousRegion::contains: wrong point size");
  }
  const Vector d = x - center;
  if (shape == RegionShape::box) {
    for (int a = 0; a < k; ++a) {
      if (std::abs(d[a]) > box_halfwidth[a]) return false;
    }
    return true;
  }
  const Vector solved = q_rr.ldlt().solve(d);
  return d.dot(solved) <= chi2_bound;
}

SimultaneousRegion simultaneous_region(const DebiasedEstimate& est,
                                       const std::vector<int>& R, double alpha,
                                       RegionShape shape) {
  if (R.empty()) throw ArgumentError("simultaneous_region: empty index set");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("simultaneous_region: alpha must lie in (0,1)");
  }
  const int k = static_cast<int>(R.size());

  SimultaneousRegion region;
  region.R = R;
  region.shape = shape;
  region.center.resize(k);
  for (int a = 0; a < k; ++a) region.center[a] = est.theta_u[R[a]];
  region.q_rr = est.q_submatrix(R);

  // Q_RR must be positive definite for either shape.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(region.q_rr);
  const double scale = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  if (eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
    // Name the coordinates loading on the near-null direction.
    const Vector null_dir = eig.eigenvectors().col(0).cwiseAbs();
    std::ostringstream msg;
    msg << "simultaneous_region: Q_RR is singular; offending coordinates:";
    for (int a = 0; a < k; ++a) {
      if (null_dir[a] >= 0.5 * null_dir.maxCoeff()) msg << " " << R[a] + 1;
    }
    throw NumericalError(msg.str());
  }

  if (shape == RegionShape::ellipsoid) {
    region.chi2_bound = chi_squared_quantile(k, 1.0 - alpha);
  } else {
    // Per-axis Sidak level: (1 - alpha_axis)^k = 1 - alpha.
    const double alpha_axis =
        1.0 - std::pow(1.0 - alpha, 1.0 / static_cast<double>(k));
    const double z = normal_quantile(1.0 - alpha_axis / 2.0);
    region.box_halfwidth.resize(k);
    for (int a = 0; a < k; ++a) {
      region.box_halfwidth[a] = z * std::sqrt(region.q_rr(a, a));
    }
  }
  return region;
}

InferenceReport build_report(const DebiasedEstimate& est, double alpha,
                             const std::string& method,
                             const std::vector<std::string>& names) {
  if (!names.empty() && static_cast<int>(names.size()) != est.p) {
    throw DimensionError("build_report: names length must equal p");
  }
  InferenceReport report;
  report.alpha = alpha;
  report.method = method;
  report.sigma_hat = est.sigma_hat;

  const auto intervals = confidence_intervals(est, alpha);
  bool degenerate = false;
  const Vector pv = p_values(est, &degenerate);
  report.degenerate_se = degenerate;
  const TestDecisions decisions = test_decisions(pv, alpha);

  report.coords.resize(est.p);
  for (int i = 0; i < est.p; ++i) {
    CoordinateInference& c = report.coords[i];
    c.index = i + 1;
    c.name = names.empty() ? "x" + std::to_string(i + 1) : names[i];
    c.estimate = est.theta_u[i];
    c.se = est.se(i);
    c.ci_lower = intervals[i].lower;
    c.ci_upper = intervals[i].upper;
    c.p_value = pv[i];
    c.p_adj = std::min(1.0, static_cast<double>(est.p) * pv[i]);
    c.reject = decisions.reject[i];
    c.reject_fwer = decisions.reject_fwer[i];
  }
  return report;
}

}  // namespace dlasso
