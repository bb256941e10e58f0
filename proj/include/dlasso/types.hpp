#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "dlasso/rng.hpp"

namespace dlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observed data for one regression instance. In simulation the generating
/// noise s.d. can be carried along (sigma_known); on real data it is absent.
struct RegressionProblem {
  Matrix X;  // n x p design
  Vector Y;  // n responses
  std::optional<double> sigma_known;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }

  /// Throws DimensionError / ArgumentError on malformed data
  /// (n < 2, p < 1, non-finite entries, length mismatch).
  void validate() const;
};

/// Sparse coefficient vector used to generate synthetic problems.
struct GroundTruth {
  Vector theta0;
  std::vector<int> support;  // 0-based indices of nonzero coefficients, ascending
  int s0 = 0;
  double b = 0.0;

  int p() const { return static_cast<int>(theta0.size()); }
};

/// Population covariance of the design rows.
struct CovarianceSpec {
  enum class Kind { identity, circulant, custom };

  Kind kind = Kind::identity;
  int p = 0;
  Matrix custom;  // used only for Kind::custom

  static CovarianceSpec Identity(int p);
  static CovarianceSpec Circulant(int p);
  static CovarianceSpec Custom(Matrix sigma);  // validates symmetry

  /// Dense p x p covariance matrix.
  Matrix materialize() const;
};

/// Noise distribution for W. Gaussian by default; a custom hook draws one
/// variate per call from the provided stream.
struct NoiseSpec {
  double sigma = 1.0;
  std::function<double(SplitMix64&)> hook;  // empty -> N(0, sigma^2)

  static NoiseSpec Gaussian(double sigma);
  static NoiseSpec Custom(std::function<double(SplitMix64&)> draw);
};

}  // namespace dlasso
