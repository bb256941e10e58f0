#include "dlasso/debias.hpp"

#include <cmath>
#include <sstream>

#include "dlasso/csv.hpp"
#include "dlasso/errors.hpp"
#include "dlasso/lasso.hpp"
#include "dlasso/parallel.hpp"

namespace dlasso {

SampleCovariance sample_covariance(const Matrix& X) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw DimensionError("sample_covariance: empty design");
  }
  const double n = static_cast<double>(X.rows());
  Matrix s = X.transpose() * X / n;
  s = 0.5 * (s + s.transpose()).eval();  // force exact symmetry
  return {std::move(s)};
}

namespace {

// Iterates become meaningless past this scale: the penalized objective is
// unbounded below, which certifies the hard constraint cannot be met.
constexpr double kDivergenceGuard = 1e10;

struct CdResult {
  Vector m;
  int iterations = 0;
  double kkt_violation = 0.0;
  bool converged = false;
  bool diverged = false;
};

// Cyclic coordinate descent for
//   min (1/2) m'Sm - b'm + mu ||m||_1,   m[skip] frozen (skip < 0: none).
// v = S m is maintained incrementally and recomputed before each exact KKT
// certificate.
CdResult cd_penalized_quadratic(const Matrix& S, const Vector& b, int skip,
                                double mu, Vector m, double tol,
                                int max_iter) {
  const int p = static_cast<int>(S.rows());
  Vector v = S * m;

  auto sweep = [&](bool active_only) {
    double max_delta = 0.0;
    for (int j = 0; j < p; ++j) {
      if (j == skip) continue;
      const double sjj = S(j, j);
      if (sjj <= 0.0) continue;
      if (active_only && m[j] == 0.0) continue;
      const double z = b[j] - v[j] + sjj * m[j];
      const double t = soft_threshold(z, mu) / sjj;
      const double delta = t - m[j];
      if (delta != 0.0) {
        v += S.col(j) * delta;
        m[j] = t;
        max_delta = std::max(max_delta, std::abs(delta) * sjj);
      }
    }
    return max_delta;
  };

  auto exact_kkt = [&]() {
    v = S * m;
    double worst = 0.0;
    for (int j = 0; j < p; ++j) {
      if (j == skip) continue;
      if (S(j, j) <= 0.0) continue;
      const double r = v[j] - b[j];
      double viol;
      if (m[j] > 0.0) {
        viol = std::abs(r + mu);
      } else if (m[j] < 0.0) {
        viol = std::abs(r - mu);
      } else {
        viol = std::max(0.0, std::abs(r) - mu);
      }
      worst = std::max(worst, viol);
    }
    return worst;
  };

  CdResult out;
  int iter = 0;
  while (iter < max_iter) {
    const double delta_full = sweep(false);
    ++iter;
    if (m.lpNorm<1>() > kDivergenceGuard) {
      out.diverged = true;
      break;
    }
    if (delta_full <= 0.1 * tol) {
      out.kkt_violation = exact_kkt();
      if (out.kkt_violation <= tol) {
        out.converged = true;
        break;
      }
      continue;
    }
    while (iter < max_iter) {
      const double delta_active = sweep(true);
      ++iter;
      if (delta_active <= 0.1 * tol) break;
    }
  }
  if (!out.converged && !out.diverged) {
    out.kkt_violation = exact_kkt();
    out.converged = out.kkt_violation <= tol;
  }
  out.m = std::move(m);
  out.iterations = iter;
  return out;
}

DebiasRow solve_row_at_mu(const SampleCovariance& sigma_hat, int i, double mu,
                          double tol, int max_iter, const Vector& init) {
  const Matrix& S = sigma_hat.sigma_hat_matrix;
  const int p = sigma_hat.p();
  Vector b = Vector::Zero(p);
  b[i] = 1.0;

  CdResult cd = cd_penalized_quadratic(S, b, -1, mu, init, tol, max_iter);

  DebiasRow row;
  row.mu_used = mu;
  row.iterations = cd.iterations;
  row.kkt_violation = cd.kkt_violation;
  row.converged = cd.converged;
  if (cd.diverged) {
    // Return the last sane warm start rather than the blown-up iterate.
    row.m = init;
    row.slack = (S * row.m - b).lpNorm<Eigen::Infinity>();
    row.feasible = false;
    return row;
  }
  row.m = std::move(cd.m);
  row.slack = (S * row.m - b).lpNorm<Eigen::Infinity>();
  row.feasible = row.slack <= mu + tol;
  return row;
}

Vector default_row_init(const SampleCovariance& sigma_hat, int i) {
  const int p = sigma_hat.p();
  Vector init = Vector::Zero(p);
  const double sii = sigma_hat.sigma_hat_matrix(i, i);
  if (sii > 0.0) init[i] = 1.0 / sii;
  return init;
}

}  // namespace

DebiasRow solve_debias_row(const SampleCovariance& sigma_hat, int i, double mu,
                           double tol, int max_iter) {
  if (i < 0 || i >= sigma_hat.p()) {
    throw ArgumentError("solve_debias_row: coordinate out of range");
  }
  if (!(mu > 0.0)) throw ArgumentError("solve_debias_row: mu must be > 0");
  return solve_row_at_mu(sigma_hat, i, mu, tol, max_iter,
                         default_row_init(sigma_hat, i));
}

double default_mu(int p, int n) {
  if (p < 2 || n < 1) throw ArgumentError("default_mu: need p >= 2, n >= 1");
  return 2.0 * std::sqrt(std::log(static_cast<double>(p)) / n);
}

DebiasMatrix build_debias_matrix(const SampleCovariance& sigma_hat, double mu,
                                 EscalationPolicy escalation, int threads,
                                 double tol, int max_iter) {
  if (!(mu > 0.0)) throw ArgumentError("build_debias_matrix: mu must be > 0");
  const int p = sigma_hat.p();

  DebiasMatrix result;
  result.M.resize(p, p);
  result.achieved_slack = Vector::Zero(p);
  result.feasible.assign(p, false);
  std::vector<double> mu_used(p, mu);

  parallel_for(p, threads, [&](int i) {
    DebiasRow row = solve_row_at_mu(sigma_hat, i, mu, tol, max_iter,
                                    default_row_init(sigma_hat, i));
    double mu_row = mu;
    for (int step = 0;
         !row.feasible && step < escalation.max_steps &&
         escalation.factor > 1.0;
         ++step) {
      mu_row *= escalation.factor;
      row = solve_row_at_mu(sigma_hat, i, mu_row, tol, max_iter, row.m);
    }
    result.M.row(i) = row.m.transpose();
    result.achieved_slack[i] = row.slack;
    result.feasible[i] = row.feasible;
    mu_used[i] = row.mu_used;
  });

  result.mu_target = *std::max_element(mu_used.begin(), mu_used.end());

  bool all_feasible = true;
  for (int i = 0; i < p; ++i) all_feasible = all_feasible && result.feasible[i];
  if (!all_feasible) {
    // Algorithm fallback: discard the partial solve, keep the identity.
    result.M = Matrix::Identity(p, p);
    result.fallback_identity = true;
    for (int i = 0; i < p; ++i) {
      Vector e = Vector::Zero(p);
      e[i] = 1.0;
      result.achieved_slack[i] =
          (sigma_hat.sigma_hat_matrix.col(i) - e).lpNorm<Eigen::Infinity>();
      result.feasible[i] = result.achieved_slack[i] <= result.mu_target + tol;
    }
  }
  return result;
}

namespace {

// Dykstra's alternating projection onto the intersection of the slabs
//   |(S m - e_i)_j| <= mu   (j = 1..p)  and  |(X m)_k| <= cap  (k = 1..n),
// each an individual closed-form projection. Returns the projected point;
// convergence is up to the iteration budget.
Vector dykstra_project(const Matrix& S, const Matrix& X, const Vector& ei,
                       double mu, double cap, Vector m, int sweeps) {
  const int p = static_cast<int>(S.rows());
  const int nrows = static_cast<int>(X.rows());
  Vector s_norm2(p), x_norm2(nrows);
  for (int j = 0; j < p; ++j) s_norm2[j] = S.row(j).squaredNorm();
  for (int k = 0; k < nrows; ++k) x_norm2[k] = X.row(k).squaredNorm();

  // Dykstra correction for a slab is a scalar multiple of its normal vector.
  Vector corr_coefs_s = Vector::Zero(p);
  Vector corr_coefs_x = Vector::Zero(nrows);

  // A slab {l <= a'm <= u} stores its correction as a scalar multiple of a.
  auto project_slab = [](Vector& m_, const auto& a, double norm2, double lo,
                         double hi, double& corr_coef) {
    if (norm2 <= 0.0) return;
    // Add back the previous correction before projecting (Dykstra).
    double val = a.dot(m_) + corr_coef * norm2;
    m_ += corr_coef * a.transpose();
    double shift = 0.0;
    if (val > hi) {
      shift = (val - hi) / norm2;
    } else if (val < lo) {
      shift = (val - lo) / norm2;
    }
    if (shift != 0.0) m_ -= shift * a.transpose();
    corr_coef = shift;
  };

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int j = 0; j < p; ++j) {
      project_slab(m, S.row(j), s_norm2[j], ei[j] - mu, ei[j] + mu,
                   corr_coefs_s[j]);
    }
    for (int k = 0; k < nrows; ++k) {
      project_slab(m, X.row(k), x_norm2[k], -cap, cap, corr_coefs_x[k]);
    }
    const double viol_s =
        (S * m - ei).cwiseAbs().maxCoeff() - mu;
    const double viol_x = (X * m).cwiseAbs().maxCoeff() - cap;
    if (viol_s <= 1e-12 && viol_x <= 1e-12) break;
  }
  return m;
}

}  // namespace

NonGaussianRow solve_debias_row_nongaussian(const SampleCovariance& sigma_hat,
                                            const Matrix& X, int i, double mu,
                                            double beta, double tol,
                                            int max_iter) {
  const int p = sigma_hat.p();
  if (i < 0 || i >= p) {
    throw ArgumentError("solve_debias_row_nongaussian: coordinate out of range");
  }
  if (!(mu > 0.0)) {
    throw ArgumentError("solve_debias_row_nongaussian: mu must be > 0");
  }
  if (!(beta > 0.25 && beta < 0.5)) {
    throw ArgumentError(
        "solve_debias_row_nongaussian: beta must lie in (1/4, 1/2)");
  }
  if (X.cols() != p) {
    throw DimensionError("solve_debias_row_nongaussian: X and Sigma_hat "
                         "disagree on p");
  }
  const Matrix& S = sigma_hat.sigma_hat_matrix;
  const double n = static_cast<double>(X.rows());
  const double cap = std::pow(n, beta);
  Vector ei = Vector::Zero(p);
  ei[i] = 1.0;

  // Gradient step size from the largest eigenvalue of S (objective
  // (1/2) m'Sm, gradient S m).
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const double lip = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lip;

  Vector m = default_row_init(sigma_hat, i);
  m = dykstra_project(S, X, ei, mu, cap, m, 200);

  double prev_obj = m.dot(S * m);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Vector candidate = m - step * (S * m);
    candidate = dykstra_project(S, X, ei, mu, cap, candidate, 60);
    const double obj = candidate.dot(S * candidate);
    const bool feasible_now =
        (S * candidate - ei).cwiseAbs().maxCoeff() <= mu + tol &&
        (X * candidate).cwiseAbs().maxCoeff() <= cap + tol;
    m = candidate;
    if (feasible_now &&
        std::abs(prev_obj - obj) <= 1e-12 * std::max(1.0, prev_obj)) {
      ++iter;
      break;
    }
    prev_obj = obj;
  }

  NonGaussianRow row;
  row.m = m;
  row.slack = (S * m - ei).cwiseAbs().maxCoeff();
  row.xm_inf = (X * m).cwiseAbs().maxCoeff();
  row.iterations = iter;
  row.feasible = row.slack <= mu + tol && row.xm_inf <= cap + tol;
  return row;
}

DebiasMatrix build_debias_matrix_nodewise(const Matrix& X,
                                          NodewisePolicy policy, int threads,
                                          double tol, int max_iter) {
  const int p = static_cast<int>(X.cols());
  if (p < 2) {
    throw DimensionError("build_debias_matrix_nodewise: need p >= 2");
  }
  const double n = static_cast<double>(X.rows());
  const SampleCovariance cov = sample_covariance(X);
  const Matrix& S = cov.sigma_hat_matrix;
  const double log_p = std::log(static_cast<double>(p));

  DebiasMatrix result;
  result.M.resize(p, p);
  result.achieved_slack = Vector::Zero(p);
  result.feasible.assign(p, true);

  parallel_for(p, threads, [&](int i) {
    double lambda_i = policy.fixed_value > 0.0
                          ? policy.fixed_value
                          : policy.scale * std::sqrt(S(i, i) * log_p / n);
    if (!(lambda_i > 0.0)) {
      throw ArgumentError(
          "build_debias_matrix_nodewise: nonpositive nodewise penalty");
    }
    // gamma = lasso regression of column i on the others, on the Gram matrix.
    CdResult cd = cd_penalized_quadratic(S, S.col(i), i, lambda_i,
                                         Vector::Zero(p), tol, max_iter);
    if (cd.diverged || !cd.converged) {
      throw NumericalError(
          "build_debias_matrix_nodewise: nodewise regression did not "
          "converge for column " +
          std::to_string(i + 1));
    }
    // tau2 = X_i'(X_i - X_{-i} gamma)/n, the nodewise residual inner product.
    const double tau2 = S(i, i) - S.col(i).dot(cd.m);
    if (!(tau2 > 1e-12)) {
      throw DegenerateFitError(
          "build_debias_matrix_nodewise: zero residual in nodewise "
          "regression of column " +
          std::to_string(i + 1));
    }
    Vector m = -cd.m;
    m[i] = 1.0;
    m /= tau2;
    result.M.row(i) = m.transpose();
    Vector ei = Vector::Zero(p);
    ei[i] = 1.0;
    result.achieved_slack[i] = (S * m - ei).lpNorm<Eigen::Infinity>();
  });

  result.mu_target = result.achieved_slack.maxCoeff();
  result.fallback_identity = false;
  return result;
}

double generalized_coherence(const SampleCovariance& sigma_hat,
                             const Matrix& M) {
  if (M.rows() != sigma_hat.p() || M.cols() != sigma_hat.p()) {
    throw DimensionError("generalized_coherence: shape mismatch");
  }
  const int p = sigma_hat.p();
  return (M * sigma_hat.sigma_hat_matrix - Matrix::Identity(p, p))
      .cwiseAbs()
      .maxCoeff();
}

std::string debias_matrix_csv(const DebiasMatrix& M) {
  return matrix_to_csv(M.M);
}

}  // namespace dlasso
