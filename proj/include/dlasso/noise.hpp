#pragma once

#include <optional>

#include "dlasso/lasso.hpp"
#include "dlasso/types.hpp"

namespace dlasso {

struct NoiseEstimate {
  double sigma_hat = 0.0;
  double lambda_used = 0.0;  // 0 sentinel for the oracle passthrough
  int iterations = 0;
  bool converged = false;
};

/// Scaled-LASSO noise estimate: fixed point of
///   sigma <- ||Y - X theta_hat(sigma * lambda0)||_2 / sqrt(n)
/// started from ||Y||_2 / sqrt(n). lambda0 defaults to sqrt(2 log(p) / n).
/// A residual collapsing below 1e-12 (exact interpolation) raises
/// DegenerateFitError; hitting max_iter returns converged=false.
NoiseEstimate estimate_sigma_scaled_lasso(
    const RegressionProblem& problem,
    std::optional<double> lambda0 = std::nullopt, double tol = 1e-6,
    int max_iter = 100);

/// Same iteration, also returning the LASSO fit at the final penalty
/// (useful as a warm start downstream).
struct ScaledLassoResult {
  NoiseEstimate estimate;
  LassoFit fit;
};
ScaledLassoResult estimate_sigma_scaled_lasso_with_fit(
    const RegressionProblem& problem,
    std::optional<double> lambda0 = std::nullopt, double tol = 1e-6,
    int max_iter = 100);

/// Post-selection alternative: sigma_hat = ||R||_2 / sqrt(n - s_hat) with R
/// and s_hat from the scaled-LASSO fit. Offered as a cross-check; must agree
/// with the scaled-LASSO value within ~10% on well-posed problems.
NoiseEstimate estimate_sigma_post_selection(
    const RegressionProblem& problem,
    std::optional<double> lambda0 = std::nullopt);

/// Simulation mode: returns problem.sigma_known unchanged (lambda_used = 0
/// sentinel). Missing sigma_known raises ArgumentError.
NoiseEstimate sigma_oracle_passthrough(const RegressionProblem& problem);

}  // namespace dlasso
