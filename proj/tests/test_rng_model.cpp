#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dlasso/errors.hpp"
#include "dlasso/model.hpp"
#include "dlasso/rng.hpp"

using namespace dlasso;

TEST_CASE("splitmix64 streams are deterministic and tag-separated") {
  SplitMix64 a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
  }
  CHECK(derive_stream(7, stream_tag::design) !=
        derive_stream(7, stream_tag::noise));
  CHECK(derive_stream(7, stream_tag::noise) !=
        derive_stream(8, stream_tag::noise));
}

TEST_CASE("gaussian draws have unit variance within 5% over 1e4 draws") {
  SplitMix64 rng(2024);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("circulant sigma: banded rows, symmetry, rotation invariance") {
  const Matrix sigma = build_circulant_sigma(600);
  // Row 1 (0-based row 0): 1 on the diagonal, 0.1 at columns 2..6 and
  // 596..600 in 1-based indexing, 0 elsewhere.
  for (int k = 0; k < 600; ++k) {
    const double expected =
        k == 0 ? 1.0 : ((k >= 1 && k <= 5) || (k >= 595 && k <= 599)) ? 0.1
                                                                      : 0.0;
    CHECK(sigma(0, k) == doctest::Approx(expected).epsilon(0));
  }
  CHECK(sigma.isApprox(sigma.transpose(), 0.0));
  // Each row is a rotation of the previous one.
  for (int j = 0; j < 40; ++j) {
    for (int k = 0; k < 600; ++k) {
      CHECK(sigma(j, k) == sigma((j + 1) % 600, (k + 1) % 600));
    }
  }
}

TEST_CASE("circulant sigma: p=12 column 7 of row 1 is outside both bands") {
  const Matrix sigma = build_circulant_sigma(12);
  CHECK(sigma(0, 6) == 0.0);
}

TEST_CASE("circulant sigma rejects p <= 11") {
  CHECK_THROWS_AS(build_circulant_sigma(11), DimensionError);
  CHECK_THROWS_AS(build_circulant_sigma(5), DimensionError);
}

TEST_CASE("circulant sigma at p=20 is positive definite (eigen oracle)") {
  const Matrix sigma = build_circulant_sigma(20);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("random_support draws exact sparse vectors") {
  SUBCASE("empty support") {
    const GroundTruth t = random_support(30, 0, 1.0, 5);
    CHECK(t.support.empty());
    CHECK(t.theta0.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("full support") {
    const GroundTruth t = random_support(15, 15, -2.5, 5);
    for (int i = 0; i < 15; ++i) CHECK(t.theta0[i] == -2.5);
  }
  SUBCASE("paper configuration p=600 s0=10 b=0.5") {
    const GroundTruth t = random_support(600, 10, 0.5, 99);
    CHECK(t.s0 == 10);
    int nonzeros = 0;
    for (int i = 0; i < 600; ++i) {
      if (t.theta0[i] != 0.0) {
        ++nonzeros;
        CHECK(t.theta0[i] == 0.5);
      }
    }
    CHECK(nonzeros == 10);
    // Support sorted, distinct, consistent with theta0.
    for (size_t k = 1; k < t.support.size(); ++k) {
      CHECK(t.support[k] > t.support[k - 1]);
    }
  }
  SUBCASE("s0 > p rejected") {
    CHECK_THROWS_AS(random_support(4, 5, 1.0, 1), ArgumentError);
  }
  SUBCASE("deterministic in the seed") {
    const GroundTruth t1 = random_support(100, 7, 1.0, 11);
    const GroundTruth t2 = random_support(100, 7, 1.0, 11);
    CHECK(t1.support == t2.support);
  }
}

TEST_CASE("sample_problem: identical seed gives bit-identical data") {
  const CovarianceSpec spec = CovarianceSpec::Circulant(20);
  const GroundTruth truth = random_support(20, 3, 0.5, 7);
  const RegressionProblem a =
      sample_problem(spec, truth, 50, NoiseSpec::Gaussian(1.0), 7);
  const RegressionProblem b =
      sample_problem(spec, truth, 50, NoiseSpec::Gaussian(1.0), 7);
  CHECK(a.X == b.X);
  CHECK(a.Y == b.Y);
  CHECK(a.sigma_known == 1.0);
}

TEST_CASE("sample_problem: zero signal symmetry") {
  const CovarianceSpec spec = CovarianceSpec::Circulant(15);
  const GroundTruth truth = random_support(15, 0, 0.0, 1);
  const RegressionProblem prob =
      sample_problem(spec, truth, 1000, NoiseSpec::Gaussian(1.0), 3);
  CHECK(std::abs(prob.Y.mean()) <= 4.0 / std::sqrt(1000.0));
}

TEST_CASE("sample_problem: identity covariance LLN check") {
  const CovarianceSpec spec = CovarianceSpec::Identity(10);
  const GroundTruth truth = random_support(10, 0, 0.0, 1);
  const RegressionProblem prob =
      sample_problem(spec, truth, 5000, NoiseSpec::Gaussian(1.0), 12);
  const Matrix cov = prob.X.transpose() * prob.X / 5000.0;
  const Matrix err = cov - Matrix::Identity(10, 10);
  CHECK(err.cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("sample_design rejects a non-positive-definite covariance") {
  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 0) = -1.0;
  const CovarianceSpec spec = CovarianceSpec::Custom(bad);
  CHECK_THROWS_AS(sample_design(spec, 10, 1), FactorizationError);
}

TEST_CASE("gaussian noise spec: empirical variance within 5% of sigma^2") {
  const Vector w = sample_noise(NoiseSpec::Gaussian(0.7), 20000, 4);
  const double var = w.squaredNorm() / w.size() - std::pow(w.mean(), 2);
  CHECK(std::abs(var - 0.49) < 0.05 * 0.49);
}

TEST_CASE("custom noise hook is used verbatim") {
  const NoiseSpec spec =
      NoiseSpec::Custom([](SplitMix64& rng) { return rng.next_double() - 0.5; });
  const Vector w = sample_noise(spec, 500, 9);
  CHECK(w.cwiseAbs().maxCoeff() <= 0.5);
  const Vector w2 = sample_noise(spec, 500, 9);
  CHECK(w == w2);
}

TEST_CASE("column normalization scales to sqrt(n)") {
  SplitMix64 rng(5);
  Matrix X(40, 6);
  for (int i = 0; i < X.size(); ++i) X(i / 6, i % 6) = rng.next_gaussian();
  normalize_columns(X);
  for (int j = 0; j < 6; ++j) {
    CHECK(X.col(j).norm() == doctest::Approx(std::sqrt(40.0)).epsilon(1e-12));
  }
}
