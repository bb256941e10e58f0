#pragma once

#include <vector>

#include "dlasso/types.hpp"

namespace dlasso {

struct LassoFit {
  Vector theta_hat;
  double lambda = 0.0;
  int iterations = 0;  // full coordinate sweeps
  double max_kkt_violation = 0.0;
  bool converged = false;
};

/// sign(z) * max(|z| - t, 0)
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Cyclic coordinate descent for
///   min_theta  (1/2n) ||Y - X theta||_2^2 + lambda ||theta||_1
/// Coordinates are visited in ascending order; no intercept is fitted
/// (inputs are expected centered). Convergence is certified by the exact
/// KKT residual recomputed from scratch: the fit is converged when
///   |X_j' R / n| <= lambda + tol        for inactive j and
///   |X_j' R / n - lambda sign(theta_j)| <= tol   for active j.
/// Non-convergence within max_iter returns converged=false with the
/// achieved violation; it does not throw.
///
/// warm: optional starting point (empty -> zeros).
/// objective_trace: when non-null, receives the objective after every sweep.
LassoFit fit_lasso(const RegressionProblem& problem, double lambda,
                   double tol = 1e-8, int max_iter = 100000,
                   const Vector& warm = Vector(),
                   std::vector<double>* objective_trace = nullptr);

/// sigma_hat * sqrt(c^2 log(p) / n). Rejects p < 2 (log p = 0 would give
/// lambda = 0, which breaks the debias solver's duality certificate).
double default_lambda(int p, int n, double sigma_hat, double c = 2.0);

/// (1/2n) ||Y - X theta||^2 + lambda ||theta||_1
double lasso_objective(const Matrix& X, const Vector& Y, const Vector& theta,
                       double lambda);

}  // namespace dlasso
