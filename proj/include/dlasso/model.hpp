#pragma once

#include <cstdint>
#include <string>

#include "dlasso/types.hpp"

namespace dlasso {

/// Circulant covariance: unit diagonal, 0.1 on the five nearest neighbours
/// on each side (circular distance 1..5), zero elsewhere. Requires p > 11
/// so the two bands cannot meet.
Matrix build_circulant_sigma(int p);

/// s0 support indices drawn uniformly without replacement; theta0 = b on the
/// support and 0 off it. Support is reported sorted ascending.
GroundTruth random_support(int p, int s0, double b, std::uint64_t seed);

/// n i.i.d. N(0, Sigma) rows via the Cholesky factor of Sigma. A
/// non-positive-definite Sigma raises FactorizationError.
Matrix sample_design(const CovarianceSpec& spec, int n, std::uint64_t seed);

/// n noise draws from the spec (its own derived stream).
Vector sample_noise(const NoiseSpec& noise, int n, std::uint64_t seed);

/// Full synthetic instance: X from (spec, seed), W from (noise, seed),
/// Y = X theta0 + W. sigma_known is set for Gaussian noise.
RegressionProblem sample_problem(const CovarianceSpec& spec,
                                 const GroundTruth& truth, int n,
                                 const NoiseSpec& noise, std::uint64_t seed);

/// Opt-in column scaling to ||X e_i||_2 = sqrt(n) (not applied by default
/// anywhere in the pipeline).
void normalize_columns(Matrix& X);

/// Headerless p x p CSV ingestion; validates symmetry.
CovarianceSpec load_covariance_csv(const std::string& path);

}  // namespace dlasso
