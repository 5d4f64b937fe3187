#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fastmc/dense_mat.hpp"

namespace fastmc {

// Principal-angle summary of two k-dimensional subspaces. tan_theta is
// +infinity when the subspaces contain orthogonal directions. dist_c_ub is
// the rotation-alignment cost ||V Q - U|| at the Procrustes rotation, an
// upper bound on the exact minimum over orthogonal Q.
struct SubspaceGeometry {
  double sin_theta = 0.0;
  double cos_theta = 0.0;
  double tan_theta = 0.0;
  double dist = 0.0;  // equals sin_theta, computed on the orthonormalized bases
  double dist_c_ub = 0.0;
};

// ||(I - U U^T) W|| on the orthonormalized bases of the two spans; symmetric
// in its arguments.
double principal_dist(const DenseMat& a, const DenseMat& b);

// Requires columns orthonormal within 1e-8 (NotOrthonormal otherwise); no
// silent re-orthonormalization.
SubspaceGeometry subspace_geometry(const DenseMat& v, const DenseMat& u);

// Smallest mu with every row norm <= mu sqrt(k/m); in [1, sqrt(m/k)].
double incoherence(const DenseMat& u);

// l_i = x_i^T (X^T X)^-1 x_i via QR; sums to k.
std::vector<double> leverage_scores(const DenseMat& x);

double condition_number(const DenseMat& x);

// Executable perturbation bounds. Each returns (lhs, rhs) of its inequality
// and throws PreconditionViolated when its hypothesis fails.
struct LeveragePerturbation {
  std::vector<double> lhs;  // | sqrt(l_i(A)) - sqrt(l_i(B)) | per row
  double rhs = 0.0;         // 75 ||A-B|| kappa(A)^4 / sigma_min(A)
};
LeveragePerturbation check_incoherence_perturbation(const DenseMat& a,
                                                    const DenseMat& b);

// dist(X, Y) vs 4 ||X-Y|| (sigma_min(X) sigma_min(Y))^-1/2, valid under
// ||X-Y||^2 <= sigma_min(X) sigma_min(Y).
std::pair<double, double> check_dist_by_spectral(const DenseMat& x, const DenseMat& y);

// ||A^+ - B^+|| vs 2 max(||A^+||^2, ||B^+||^2) ||A - B||.
std::pair<double, double> check_pinv_perturbation(const DenseMat& a, const DenseMat& b);

// Worst observed ratios of the two fourth-moment sums against their
// incoherence bounds, over random unit probes plus the max-leverage row
// directions (which realize the tight case).
std::pair<double, double> check_fourth_moment(const DenseMat& u_t,
                                              const DenseMat& u_star, double mu2,
                                              double mu, std::size_t trials,
                                              std::uint64_t seed);

}  // namespace fastmc
