#include "oracles.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dlasso/lasso.hpp"

namespace oracles {

using dlasso::Matrix;
using dlasso::Vector;

double lasso_enumeration_objective(const Matrix& X, const Vector& Y,
                                   double lambda) {
  const int p = static_cast<int>(X.cols());
  const double n = static_cast<double>(X.rows());
  const Matrix gram = X.transpose() * X / n;
  const Vector xty = X.transpose() * Y / n;

  long patterns = 1;
  for (int j = 0; j < p; ++j) patterns *= 3;

  double best = dlasso::lasso_objective(X, Y, Vector::Zero(p), lambda);
  for (long code = 0; code < patterns; ++code) {
    long c = code;
    std::vector<int> sign(p);
    std::vector<int> active;
    for (int j = 0; j < p; ++j) {
      sign[j] = static_cast<int>(c % 3) - 1;  // -1, 0, +1
      if (sign[j] != 0) active.push_back(j);
      c /= 3;
    }
    if (active.empty()) continue;
    const int k = static_cast<int>(active.size());
    Matrix g(k, k);
    Vector rhs(k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) g(a, b) = gram(active[a], active[b]);
      rhs[a] = xty[active[a]] - lambda * sign[active[a]];
    }
    const Eigen::FullPivLU<Matrix> lu(g);
    if (!lu.isInvertible()) continue;
    const Vector theta_active = lu.solve(rhs);
    Vector theta = Vector::Zero(p);
    for (int a = 0; a < k; ++a) theta[active[a]] = theta_active[a];
    best = std::min(best, dlasso::lasso_objective(X, Y, theta, lambda));
  }
  return best;
}

double qp_constrained_objective(const Matrix& S, int i, double mu,
                                int iterations) {
  const int p = static_cast<int>(S.rows());
  const Eigen::LLT<Matrix> llt(S);
  Vector ei = Vector::Zero(p);
  ei[i] = 1.0;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lip = 2.0 / std::max(lambda_min, 1e-12);
  const double step = 1.0 / lip;

  auto grad = [&](const Vector& u) -> Vector {
    return 2.0 * llt.solve(u + ei);
  };
  auto clamp_box = [&](Vector u) {
    for (int j = 0; j < p; ++j) u[j] = std::clamp(u[j], -mu, mu);
    return u;
  };

  // FISTA on g(u) = (u+e_i)' S^{-1} (u+e_i) over the box, then plain
  // projected-gradient polish.
  Vector u = Vector::Zero(p);
  Vector y = u;
  double t = 1.0;
  const int accel = iterations / 2;
  for (int k = 0; k < accel; ++k) {
    const Vector u_next = clamp_box(y - step * grad(y));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = u_next + ((t - 1.0) / t_next) * (u_next - u);
    u = u_next;
    t = t_next;
  }
  for (int k = 0; k < iterations - accel; ++k) {
    u = clamp_box(u - step * grad(u));
  }
  const Vector m = llt.solve(u + ei);
  return m.dot(S * m);
}

double nongaussian_objective(const Matrix& S, const Matrix& X, int i,
                             double mu, double cap, int outer_iterations) {
  const int p = static_cast<int>(S.rows());
  const int n = static_cast<int>(X.rows());
  Vector ei = Vector::Zero(p);
  ei[i] = 1.0;

  Vector s_norm2(p), x_norm2(n);
  for (int j = 0; j < p; ++j) s_norm2[j] = S.row(j).squaredNorm();
  for (int k = 0; k < n; ++k) x_norm2[k] = X.row(k).squaredNorm();

  auto project = [&](Vector m) {
    Vector corr_s = Vector::Zero(p);
    Vector corr_x = Vector::Zero(n);
    for (int sweep = 0; sweep < 3000; ++sweep) {
      double moved = 0.0;
      for (int j = 0; j < p; ++j) {
        if (s_norm2[j] <= 0.0) continue;
        m += corr_s[j] * S.row(j).transpose();
        const double val = S.row(j).dot(m);
        double shift = 0.0;
        if (val > ei[j] + mu) shift = (val - ei[j] - mu) / s_norm2[j];
        if (val < ei[j] - mu) shift = (val - ei[j] + mu) / s_norm2[j];
        if (shift != 0.0) m -= shift * S.row(j).transpose();
        moved = std::max(moved, std::abs(shift - corr_s[j]));
        corr_s[j] = shift;
      }
      for (int k = 0; k < n; ++k) {
        if (x_norm2[k] <= 0.0) continue;
        m += corr_x[k] * X.row(k).transpose();
        const double val = X.row(k).dot(m);
        double shift = 0.0;
        if (val > cap) shift = (val - cap) / x_norm2[k];
        if (val < -cap) shift = (val + cap) / x_norm2[k];
        if (shift != 0.0) m -= shift * X.row(k).transpose();
        moved = std::max(moved, std::abs(shift - corr_x[k]));
        corr_x[k] = shift;
      }
      if (moved < 1e-14) break;
    }
    return m;
  };

  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const double step = 1.0 / std::max(eig.eigenvalues().maxCoeff(), 1e-12);

  Vector m = project(Vector::Zero(p));
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < outer_iterations; ++k) {
    m = project(m - step * (S * m));
    const double obj = m.dot(S * m);
    if (obj < best - 1e-14) {
      best = obj;
    } else if (k > 50 && obj >= best - 1e-13) {
      break;  // stagnated
    }
  }
  return m.dot(S * m);
}

double ks_uniform_pvalue(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - samples[i];
    const double lo = samples[i] - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  const double x = std::sqrt(n) * d;
  // Kolmogorov survival function Q(x) = 2 sum_k (-1)^{k-1} e^{-2 k^2 x^2}.
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * x * x);
    q += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace oracles
