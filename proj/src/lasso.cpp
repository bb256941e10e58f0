#include "dlasso/lasso.hpp"

#include <cmath>

#include "dlasso/errors.hpp"

namespace dlasso {

double lasso_objective(const Matrix& X, const Vector& Y, const Vector& theta,
                       double lambda) {
  const double n = static_cast<double>(X.rows());
  return (Y - X * theta).squaredNorm() / (2.0 * n) +
         lambda * theta.lpNorm<1>();
}

namespace {

// Exact KKT residual of the penalized problem, computed from a fresh
// residual vector: max over j of
//   |X_j'R/n - lambda sign(theta_j)|   if theta_j != 0
//   max(0, |X_j'R/n| - lambda)         otherwise.
double kkt_violation(const Matrix& X, const Vector& residual,
                     const Vector& theta, double lambda) {
  const double n = static_cast<double>(X.rows());
  double worst = 0.0;
  for (int j = 0; j < X.cols(); ++j) {
    const double g = X.col(j).dot(residual) / n;
    double v;
    if (theta[j] > 0.0) {
      v = std::abs(g - lambda);
    } else if (theta[j] < 0.0) {
      v = std::abs(g + lambda);
    } else {
      v = std::max(0.0, std::abs(g) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

LassoFit fit_lasso(const RegressionProblem& problem, double lambda, double tol,
                   int max_iter, const Vector& warm,
                   std::vector<double>* objective_trace) {
  problem.validate();
  if (!(lambda > 0.0)) throw ArgumentError("fit_lasso: lambda must be > 0");
  if (!(tol > 0.0)) throw ArgumentError("fit_lasso: tol must be > 0");
  const Matrix& X = problem.X;
  const Vector& Y = problem.Y;
  const int p = problem.p();
  const double n = static_cast<double>(problem.n());

  Vector col_ss(p);  // Sigma_hat_jj = X_j'X_j / n
  for (int j = 0; j < p; ++j) col_ss[j] = X.col(j).squaredNorm() / n;

  Vector theta;
  if (warm.size() == 0) {
    theta = Vector::Zero(p);
  } else if (warm.size() == p) {
    theta = warm;
  } else {
    throw DimensionError("fit_lasso: warm start has wrong length");
  }
  Vector residual = Y - X * theta;

  LassoFit fit;
  fit.lambda = lambda;
  fit.theta_hat = theta;

  // One cyclic pass; returns the largest gradient-scale coefficient change.
  auto sweep = [&](Vector& th, Vector& res, bool active_only) {
    double max_delta = 0.0;
    for (int j = 0; j < p; ++j) {
      if (col_ss[j] <= 0.0) continue;
      if (active_only && th[j] == 0.0) continue;
      const double g = X.col(j).dot(res) / n;
      const double z = g + col_ss[j] * th[j];
      const double t = soft_threshold(z, lambda) / col_ss[j];
      const double delta = t - th[j];
      if (delta != 0.0) {
        res -= X.col(j) * delta;
        th[j] = t;
        max_delta = std::max(max_delta, std::abs(delta) * col_ss[j]);
      }
    }
    return max_delta;
  };

  int iter = 0;
  bool converged = false;
  double violation = 0.0;
  while (iter < max_iter) {
    const double delta_full = sweep(theta, residual, false);
    ++iter;
    if (objective_trace) {
      objective_trace->push_back(lasso_objective(X, Y, theta, lambda));
    }
    if (delta_full <= 0.1 * tol) {
      residual = Y - X * theta;  // drop incremental rounding before certifying
      violation = kkt_violation(X, residual, theta, lambda);
      if (violation <= tol) {
        converged = true;
        break;
      }
      continue;
    }
    // Inner loop on the current active set until it stabilizes.
    while (iter < max_iter) {
      const double delta_active = sweep(theta, residual, true);
      ++iter;
      if (objective_trace) {
        objective_trace->push_back(lasso_objective(X, Y, theta, lambda));
      }
      if (delta_active <= 0.1 * tol) break;
    }
  }
  if (!converged) {
    residual = Y - X * theta;
    violation = kkt_violation(X, residual, theta, lambda);
    converged = violation <= tol;
  }

  fit.theta_hat = std::move(theta);
  fit.iterations = iter;
  fit.max_kkt_violation = violation;
  fit.converged = converged;
  return fit;
}

double default_lambda(int p, int n, double sigma_hat, double c) {
  if (p < 2) {
    throw ArgumentError(
        "default_lambda: p must be >= 2 (log p = 0 gives a degenerate "
        "penalty)");
  }
  if (n < 2) throw ArgumentError("default_lambda: n must be >= 2");
  if (!(sigma_hat > 0.0)) {
    throw ArgumentError("default_lambda: sigma_hat must be positive");
  }
  if (!(c > 0.0)) throw ArgumentError("default_lambda: c must be positive");
  return sigma_hat * c * std::sqrt(std::log(static_cast<double>(p)) / n);
}

}  // namespace dlasso
