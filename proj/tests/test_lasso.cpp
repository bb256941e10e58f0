#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "dlasso/errors.hpp"
#include "dlasso/lasso.hpp"
#include "dlasso/model.hpp"
#include "dlasso/rng.hpp"
#include "oracles.hpp"

using namespace dlasso;

namespace {

Matrix random_matrix(int n, int p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.next_gaussian();
  }
  return X;
}

Vector random_vector(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  return v;
}

// Columns orthonormal, scaled so X'X/n = I exactly up to rounding.
Matrix orthonormal_design(int n, int p, std::uint64_t seed) {
  const Matrix raw = random_matrix(n, p, seed);
  const Eigen::HouseholderQR<Matrix> qr(raw);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  return std::sqrt(static_cast<double>(n)) * q;
}

}  // namespace

TEST_CASE("soft_threshold basic cases") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  SplitMix64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const double z = 10.0 * (rng.next_double() - 0.5);
    CHECK(soft_threshold(z, 0.0) == z);
  }
}

TEST_CASE("orthonormal design reduces to coordinatewise soft thresholding") {
  const int n = 60, p = 8;
  RegressionProblem prob;
  prob.X = orthonormal_design(n, p, 21);
  prob.Y = random_vector(n, 22);
  const double lambda = 0.3;
  const LassoFit fit = fit_lasso(prob, lambda);
  REQUIRE(fit.converged);
  const Vector xty = prob.X.transpose() * prob.Y / n;
  for (int j = 0; j < p; ++j) {
    CHECK(fit.theta_hat[j] ==
          doctest::Approx(soft_threshold(xty[j], lambda)).epsilon(1e-8));
  }
}

TEST_CASE("penalty above the gradient sup-norm shrinks everything to zero") {
  RegressionProblem prob;
  prob.X = random_matrix(30, 10, 31);
  prob.Y = random_vector(30, 32);
  const double lambda_max =
      (prob.X.transpose() * prob.Y / 30.0).cwiseAbs().maxCoeff();
  const LassoFit fit = fit_lasso(prob, lambda_max * 1.0000001);
  REQUIRE(fit.converged);
  CHECK(fit.theta_hat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.iterations >= 1);
}

TEST_CASE("objective matches the sign-pattern enumeration oracle on 10x5") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    RegressionProblem prob;
    prob.X = random_matrix(10, 5, 100 + seed);
    prob.Y = random_vector(10, 200 + seed);
    const double lambda = 0.05 + 0.1 * static_cast<double>(seed % 4);
    const LassoFit fit = fit_lasso(prob, lambda);
    REQUIRE(fit.converged);
    const double obj = lasso_objective(prob.X, prob.Y, fit.theta_hat, lambda);
    const double oracle =
        oracles::lasso_enumeration_objective(prob.X, prob.Y, lambda);
    CHECK(obj <= oracle + 1e-6);
    CHECK(obj >= oracle - 1e-9);  // the oracle minimum is exact
  }
}

TEST_CASE("objective is non-increasing across sweeps") {
  RegressionProblem prob;
  prob.X = random_matrix(80, 40, 41);
  prob.Y = random_vector(80, 42);
  std::vector<double> trace;
  const LassoFit fit = fit_lasso(prob, 0.1, 1e-8, 100000, Vector(), &trace);
  REQUIRE(fit.converged);
  REQUIRE(trace.size() >= 2);
  for (size_t k = 1; k < trace.size(); ++k) {
    CHECK(trace[k] <= trace[k - 1] + 1e-12);
  }
}

TEST_CASE("KKT certificate holds on converged fits") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    RegressionProblem prob;
    prob.X = random_matrix(50, 70, 300 + seed);  // p > n included
    prob.Y = random_vector(50, 400 + seed);
    const double lambda = 0.15;
    const LassoFit fit = fit_lasso(prob, lambda);
    REQUIRE(fit.converged);
    CHECK(fit.max_kkt_violation <= 1e-8);
    const Vector grad =
        prob.X.transpose() * (prob.Y - prob.X * fit.theta_hat) / 50.0;
    CHECK(grad.cwiseAbs().maxCoeff() <= lambda + 1e-8);
  }
}

TEST_CASE("scaling equivariance: (cY, c lambda) scales theta by c") {
  RegressionProblem prob;
  prob.X = random_matrix(40, 15, 51);
  prob.Y = random_vector(40, 52);
  const double lambda = 0.2, c = 3.7;
  const LassoFit base = fit_lasso(prob, lambda);
  RegressionProblem scaled = prob;
  scaled.Y *= c;
  const LassoFit big = fit_lasso(scaled, c * lambda);
  REQUIRE(base.converged);
  REQUIRE(big.converged);
  CHECK((big.theta_hat - c * base.theta_hat).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("default_lambda evaluates the closed form") {
  // 2 sqrt(log(600)/1000), frozen by direct evaluation
  CHECK(default_lambda(600, 1000, 1.0, 2.0) ==
        doctest::Approx(0.15996161608606166).epsilon(1e-14));
  CHECK(default_lambda(600, 1000, 2.0, 2.0) ==
        doctest::Approx(2.0 * 0.15996161608606166).epsilon(1e-14));
  CHECK_THROWS_AS(default_lambda(1, 100, 1.0, 2.0), ArgumentError);
  CHECK_THROWS_AS(default_lambda(10, 100, -1.0, 2.0), ArgumentError);
}

TEST_CASE("non-convergence reports the violation instead of throwing") {
  RegressionProblem prob;
  prob.X = random_matrix(40, 60, 61);
  prob.Y = 5.0 * random_vector(40, 62);
  const LassoFit fit = fit_lasso(prob, 0.01, 1e-12, 2);
  CHECK_FALSE(fit.converged);
  CHECK(fit.max_kkt_violation > 1e-12);
  CHECK(fit.theta_hat.allFinite());
}

TEST_CASE("warm start of the wrong length is rejected") {
  RegressionProblem prob;
  prob.X = random_matrix(20, 5, 71);
  prob.Y = random_vector(20, 72);
  CHECK_THROWS_AS(fit_lasso(prob, 0.1, 1e-8, 100, Vector::Zero(4)),
                  DimensionError);
}
