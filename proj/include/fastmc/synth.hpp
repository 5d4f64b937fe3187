#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fastmc/dense_mat.hpp"

namespace fastmc {

// Planted low-rank factorization used to drive experiments; entries of the
// full matrix are produced on demand by entry_oracle, never materialized.
struct GroundTruth {
  DenseMat u_star;                 // m x k, orthonormal
  std::vector<double> sigma_star;  // positive, nonincreasing, last entry 1
  DenseMat v_star;                 // n x k, orthonormal
  double mu_actual = 0.0;
  double kappa = 1.0;
};

// Orthonormal factors from QR of Gaussian matrices, rejection-resampled until
// both sides have incoherence <= mu_target; geometric singular-value profile
// from kappa down to 1. Throws IncoherenceUnreachable after 100 rejections.
GroundTruth gen_incoherent(std::size_t m, std::size_t n, std::size_t k, double kappa,
                           double mu_target, std::uint64_t seed);

// M_ij = sum_l u_il sigma_l v_jl in O(k).
double entry_oracle(const GroundTruth& gt, std::size_t i, std::size_t j);

double ground_truth_frobenius(const GroundTruth& gt);

// Three "dmat v1" files (u_star, sigma_star as a k x 1 column, v_star) plus a
// JSON sidecar with k, sigma_star, mu_actual, kappa, seed.
void write_ground_truth(const std::string& dir, const GroundTruth& gt,
                        std::uint64_t seed);
GroundTruth read_ground_truth(const std::string& dir);

}  // namespace fastmc
