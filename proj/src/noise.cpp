#include "dlasso/noise.hpp"

#include <cmath>

#include "dlasso/errors.hpp"

namespace dlasso {

namespace {

constexpr double kDegenerateSigma = 1e-12;

ScaledLassoResult scaled_lasso_impl(const RegressionProblem& problem,
                                    std::optional<double> lambda0_opt,
                                    double tol, int max_iter) {
  problem.validate();
  if (problem.n() < 3) {
    throw DimensionError("estimate_sigma_scaled_lasso: need n >= 3");
  }
  const double n = static_cast<double>(problem.n());
  const double p = static_cast<double>(problem.p());
  const double lambda0 =
      lambda0_opt ? *lambda0_opt : std::sqrt(2.0 * std::log(p) / n);
  if (!(lambda0 > 0.0)) {
    throw ArgumentError("estimate_sigma_scaled_lasso: lambda0 must be > 0");
  }

  double sigma = problem.Y.norm() / std::sqrt(n);
  if (sigma < kDegenerateSigma) {
    throw DegenerateFitError(
        "estimate_sigma_scaled_lasso: response has (near-)zero norm");
  }

  ScaledLassoResult out;
  Vector warm;  // empty -> zeros on the first fit
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    const double lambda = sigma * lambda0;
    out.fit = fit_lasso(problem, lambda, 1e-8, 100000, warm);
    warm = out.fit.theta_hat;
    const double sigma_new =
        (problem.Y - problem.X * out.fit.theta_hat).norm() / std::sqrt(n);
    if (sigma_new < kDegenerateSigma) {
      throw DegenerateFitError(
          "estimate_sigma_scaled_lasso: residual collapsed (interpolating "
          "fit); noise level not identifiable");
    }
    const double delta = std::abs(sigma_new - sigma);
    sigma = sigma_new;
    if (delta <= tol) {
      converged = true;
      ++it;
      break;
    }
  }

  out.estimate.sigma_hat = sigma;
  out.estimate.lambda_used = sigma * lambda0;
  out.estimate.iterations = it;
  out.estimate.converged = converged;
  return out;
}

}  // namespace

NoiseEstimate estimate_sigma_scaled_lasso(const RegressionProblem& problem,
                                          std::optional<double> lambda0,
                                          double tol, int max_iter) {
  return scaled_lasso_impl(problem, lambda0, tol, max_iter).estimate;
}

ScaledLassoResult estimate_sigma_scaled_lasso_with_fit(
    const RegressionProblem& problem, std::optional<double> lambda0,
    double tol, int max_iter) {
  return scaled_lasso_impl(problem, lambda0, tol, max_iter);
}

NoiseEstimate estimate_sigma_post_selection(const RegressionProblem& problem,
                                            std::optional<double> lambda0) {
  const ScaledLassoResult base = scaled_lasso_impl(problem, lambda0, 1e-6, 100);
  const int n = problem.n();
  int s_hat = 0;
  for (int j = 0; j < problem.p(); ++j) {
    if (base.fit.theta_hat[j] != 0.0) ++s_hat;
  }
  if (s_hat >= n) {
    throw DegenerateFitError(
        "estimate_sigma_post_selection: selected model size reaches n");
  }
  const double rss =
      (problem.Y - problem.X * base.fit.theta_hat).squaredNorm();
  NoiseEstimate est;
  est.sigma_hat = std::sqrt(rss / static_cast<double>(n - s_hat));
  if (est.sigma_hat < kDegenerateSigma) {
    throw DegenerateFitError(
        "estimate_sigma_post_selection: residual collapsed");
  }
  est.lambda_used = base.estimate.lambda_used;
  est.iterations = base.estimate.iterations;
  est.converged = base.estimate.converged;
  return est;
}

NoiseEstimate sigma_oracle_passthrough(const RegressionProblem& problem) {
  if (!problem.sigma_known) {
    throw ArgumentError("sigma_oracle_passthrough: sigma_known is absent");
  }
  NoiseEstimate est;
  est.sigma_hat = *problem.sigma_known;
  est.lambda_used = 0.0;  // sentinel: no penalty was involved
  est.iterations = 0;
  est.converged = true;
  return est;
}

}  // namespace dlasso
