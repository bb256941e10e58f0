#pragma once

// Test-only reference implementations, deliberately independent of the
// library's solver paths: brute-force enumeration for the LASSO, projected
// gradient in constraint space for the debias program, an alternating
// projection oracle for the non-Gaussian variant, and a Kolmogorov-Smirnov
// uniformity test for null p-values.

#include <vector>

#include "dlasso/types.hpp"

namespace oracles {

// Minimal LASSO objective over all 3^p sign patterns: each pattern fixes the
// zero set and the signs of the active coordinates, whose restricted
// stationary point is a linear solve. The true minimizer appears as the
// candidate of its own pattern, so the minimum over candidates is exact.
double lasso_enumeration_objective(const dlasso::Matrix& X,
                                   const dlasso::Vector& Y, double lambda);

// Optimal value of min m'Sm s.t. ||Sm - e_i||_inf <= mu, for invertible S:
// substituting u = Sm - e_i turns the constraint into a box, projected
// gradient (FISTA + plain polish) solves the transformed problem.
double qp_constrained_objective(const dlasso::Matrix& S, int i, double mu,
                                int iterations = 200000);

// Same program with the extra slab family ||Xm||_inf <= cap: projected
// gradient with a Dykstra projection run to stagnation at every step.
double nongaussian_objective(const dlasso::Matrix& S, const dlasso::Matrix& X,
                             int i, double mu, double cap,
                             int outer_iterations = 20000);

// One-sample Kolmogorov-Smirnov p-value against U(0,1) (asymptotic
// Kolmogorov distribution of sqrt(N) D_N).
double ks_uniform_pvalue(std::vector<double> samples);

}  // namespace oracles
