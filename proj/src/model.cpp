#include "dlasso/model.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlasso/csv.hpp"
#include "dlasso/errors.hpp"

namespace dlasso {

void RegressionProblem::validate() const {
  if (X.rows() < 2) throw DimensionError("RegressionProblem: need n >= 2");
  if (X.cols() < 1) throw DimensionError("RegressionProblem: need p >= 1");
  if (Y.size() != X.rows()) {
    throw DimensionError("RegressionProblem: Y length must equal n");
  }
  if (!X.allFinite() || !Y.allFinite()) {
    throw ArgumentError("RegressionProblem: non-finite entries");
  }
  if (sigma_known && !(*sigma_known > 0.0)) {
    throw ArgumentError("RegressionProblem: sigma_known must be positive");
  }
}

CovarianceSpec CovarianceSpec::Identity(int p) {
  if (p < 1) throw DimensionError("CovarianceSpec: p must be >= 1");
  return {Kind::identity, p, Matrix()};
}

CovarianceSpec CovarianceSpec::Circulant(int p) {
  if (p <= 11) {
    throw DimensionError("CovarianceSpec: circulant covariance needs p > 11");
  }
  return {Kind::circulant, p, Matrix()};
}

CovarianceSpec CovarianceSpec::Custom(Matrix sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1) {
    throw DimensionError("CovarianceSpec: covariance must be square");
  }
  if (!sigma.isApprox(sigma.transpose(), 1e-10)) {
    throw ArgumentError("CovarianceSpec: covariance must be symmetric");
  }
  const int p = static_cast<int>(sigma.rows());
  return {Kind::custom, p, std::move(sigma)};
}

Matrix CovarianceSpec::materialize() const {
  switch (kind) {
    case Kind::identity:
      return Matrix::Identity(p, p);
    case Kind::circulant:
      return build_circulant_sigma(p);
    case Kind::custom:
      return custom;
  }
  throw ArgumentError("CovarianceSpec: unknown kind");
}

NoiseSpec NoiseSpec::Gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("NoiseSpec: sigma must be positive");
  return {sigma, nullptr};
}

NoiseSpec NoiseSpec::Custom(std::function<double(SplitMix64&)> draw) {
  if (!draw) throw ArgumentError("NoiseSpec: empty custom hook");
  return {0.0, std::move(draw)};
}

Matrix build_circulant_sigma(int p) {
  if (p <= 11) {
    throw DimensionError(
        "build_circulant_sigma: p must exceed 11 so the two 5-wide bands "
        "cannot overlap");
  }
  Matrix sigma(p, p);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < p; ++k) {
      const int d = std::abs(j - k);
      const int circ = std::min(d, p - d);
      sigma(j, k) = circ == 0 ? 1.0 : (circ <= 5 ? 0.1 : 0.0);
    }
  }
  return sigma;
}

GroundTruth random_support(int p, int s0, double b, std::uint64_t seed) {
  if (p < 1) throw DimensionError("random_support: p must be >= 1");
  if (s0 < 0 || s0 > p) {
    throw ArgumentError("random_support: need 0 <= s0 <= p");
  }
  SplitMix64 rng(derive_stream(seed, stream_tag::support));
  // Partial Fisher-Yates over [0, p): the first s0 slots are the draw.
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s0; ++i) {
    const int j = i + static_cast<int>(rng.next_index(p - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> support(idx.begin(), idx.begin() + s0);
  std::sort(support.begin(), support.end());

  GroundTruth truth;
  truth.theta0 = Vector::Zero(p);
  for (int i : support) truth.theta0[i] = b;
  truth.support = std::move(support);
  truth.s0 = s0;
  truth.b = b;
  return truth;
}

Matrix sample_design(const CovarianceSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("sample_design: n must be >= 1");
  SplitMix64 rng(derive_stream(seed, stream_tag::design));
  Matrix Z(n, spec.p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.p; ++j) Z(i, j) = rng.next_gaussian();
  }
  if (spec.kind == CovarianceSpec::Kind::identity) return Z;

  const Matrix sigma = spec.materialize();
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(
        "sample_design: covariance is not positive definite");
  }
  // Rows x = L z have covariance L L' = Sigma.
  return Z * llt.matrixL().transpose();
}

Vector sample_noise(const NoiseSpec& noise, int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("sample_noise: n must be >= 1");
  SplitMix64 rng(derive_stream(seed, stream_tag::noise));
  Vector w(n);
  if (noise.hook) {
    for (int i = 0; i < n; ++i) w[i] = noise.hook(rng);
  } else {
    if (!(noise.sigma > 0.0)) {
      throw ArgumentError("sample_noise: sigma must be positive");
    }
    for (int i = 0; i < n; ++i) w[i] = noise.sigma * rng.next_gaussian();
  }
  return w;
}

RegressionProblem sample_problem(const CovarianceSpec& spec,
                                 const GroundTruth& truth, int n,
                                 const NoiseSpec& noise, std::uint64_t seed) {
  if (truth.p() != spec.p) {
    throw DimensionError("sample_problem: truth and covariance disagree on p");
  }
  RegressionProblem prob;
  prob.X = sample_design(spec, n, seed);
  const Vector w = sample_noise(noise, n, seed);
  prob.Y = prob.X * truth.theta0 + w;
  if (!noise.hook) prob.sigma_known = noise.sigma;
  prob.validate();
  return prob;
}

void normalize_columns(Matrix& X) {
  const double root_n = std::sqrt(static_cast<double>(X.rows()));
  for (int j = 0; j < X.cols(); ++j) {
    const double norm = X.col(j).norm();
    if (norm > 0.0) X.col(j) *= root_n / norm;
  }
}

CovarianceSpec load_covariance_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.has_header()) {
    throw ParseError("covariance CSV must be headerless: " + path);
  }
  return CovarianceSpec::Custom(table.values);
}

}  // namespace dlasso
