#pragma once

#include <string>
#include <vector>

#include "dlasso/types.hpp"

namespace dlasso {

struct SampleCovariance {
  Matrix sigma_hat_matrix;  // X'X / n, symmetrized

  int p() const { return static_cast<int>(sigma_hat_matrix.rows()); }
};

/// X'X / n with symmetry enforced by averaging with the transpose.
SampleCovariance sample_covariance(const Matrix& X);

struct DebiasRow {
  Vector m;
  bool feasible = false;
  double slack = 0.0;  // ||Sigma_hat m - e_i||_inf at the returned point
  double mu_used = 0.0;
  int iterations = 0;
  double kkt_violation = 0.0;
  bool converged = false;
};

/// Row i of the debiasing matrix:
///   min m' Sigma_hat m   s.t.  ||Sigma_hat m - e_i||_inf <= mu
/// solved through the penalized form
///   min (1/2) m' Sigma_hat m - m_i + mu ||m||_1
/// by cyclic coordinate descent (ascending order, warm start e_i /
/// Sigma_hat_ii); the stationarity condition of the penalized form enforces
/// the constraint, which is re-verified a posteriori on the exact residual.
/// Infeasibility (max_iter exhausted, or diverging iterates when the
/// penalized objective is unbounded below) is reported through
/// feasible=false with the best slack, never an exception.
DebiasRow solve_debias_row(const SampleCovariance& sigma_hat, int i, double mu,
                           double tol = 1e-8, int max_iter = 100000);

/// Escalation for infeasible rows: retry with mu * factor, warm-started,
/// up to max_steps times. factor <= 1 or max_steps == 0 disables it.
struct EscalationPolicy {
  double factor = 1.5;
  int max_steps = 5;

  static EscalationPolicy None() { return {1.0, 0}; }
};

struct DebiasMatrix {
  Matrix M;  // p x p, rows m_1..m_p
  double mu_target = 0.0;          // largest per-row mu actually used
  Vector achieved_slack;           // ||Sigma_hat m_i - e_i||_inf per row
  std::vector<bool> feasible;      // per-row certificate slack <= mu + tol
  bool fallback_identity = false;  // any row infeasible after escalation -> M = I

  int p() const { return static_cast<int>(M.rows()); }
};

/// Row-wise solve with per-row mu escalation. If any row remains infeasible
/// the whole matrix falls back to the identity (fallback_identity = true),
/// with slacks recomputed for the identity rows. Rows are solved in parallel
/// (threads = 0 picks hardware concurrency); results are independent of
/// scheduling.
DebiasMatrix build_debias_matrix(const SampleCovariance& sigma_hat, double mu,
                                 EscalationPolicy escalation = {},
                                 int threads = 0, double tol = 1e-8,
                                 int max_iter = 100000);

/// 2 sqrt(log(p) / n): default slack target for build_debias_matrix.
double default_mu(int p, int n);

struct NonGaussianRow {
  Vector m;
  bool feasible = false;
  double slack = 0.0;   // ||Sigma_hat m - e_i||_inf
  double xm_inf = 0.0;  // ||X m||_inf
  int iterations = 0;
};

/// Heavy-tail-safe variant with the extra row-influence cap:
///   min m' Sigma_hat m  s.t. ||Sigma_hat m - e_i||_inf <= mu,
///                            ||X m||_inf <= n^beta,  beta in (1/4, 1/2).
/// Solved by projected gradient steps composed with Dykstra's alternating
/// projection across the individual slabs of both constraint families
/// (each slab projection is closed-form).
NonGaussianRow solve_debias_row_nongaussian(const SampleCovariance& sigma_hat,
                                            const Matrix& X, int i, double mu,
                                            double beta = 0.4,
                                            double tol = 1e-7,
                                            int max_iter = 4000);

/// Nodewise penalty choice: lambda_i = scale * sqrt(Sigma_hat_ii log(p) / n),
/// or a fixed value for every column when fixed_value > 0.
struct NodewisePolicy {
  double scale = 0.5;
  double fixed_value = 0.0;

  static NodewisePolicy Fixed(double lambda) { return {0.0, lambda}; }
};

/// Nodewise-regression (LASSO projection / desparsified LASSO) baseline.
/// Row i is c_i * (e_i - gamma_i) where gamma_i is the LASSO regression of
/// column X_i on the remaining columns (solved on the Gram matrix) and
/// c_i = n / (X_i'(X_i - X_{-i} gamma_i)), so (Sigma_hat m_i)_i = 1 exactly.
/// A vanishing nodewise residual raises DegenerateFitError naming the column.
DebiasMatrix build_debias_matrix_nodewise(const Matrix& X,
                                          NodewisePolicy policy = {},
                                          int threads = 0, double tol = 1e-8,
                                          int max_iter = 100000);

/// |M Sigma_hat - I|_inf: worst entrywise deviation of M from acting as the
/// inverse sample covariance.
double generalized_coherence(const SampleCovariance& sigma_hat,
                             const Matrix& M);

/// Row-major CSV dump of M at 17 significant digits (audit artifact).
std::string debias_matrix_csv(const DebiasMatrix& M);

}  // namespace dlasso
