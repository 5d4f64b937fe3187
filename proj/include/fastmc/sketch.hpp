#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fastmc/dense_mat.hpp"

namespace fastmc {

// Seeded description of S = scale * P * H * D: a sign diagonal, the fast
// Hadamard mix over the zero-padded length, and a row subsample. P samples
// with replacement; when m_sk equals the padded length the operator keeps
// every transformed row instead, so the sketch degrades to an orthogonal
// transform and the downstream preconditioner becomes exact.
struct SrhtOperator {
  std::size_t n_input = 0;
  std::size_t n_pad = 0;  // next power of two >= n_input
  std::size_t m_sk = 0;
  std::vector<double> signs;              // length n_pad, entries in {-1, +1}
  std::vector<std::size_t> sampled_rows;  // length m_sk, each in [0, n_pad)
  double scale = 0.0;                     // 1 / sqrt(m_sk)
  std::uint64_t seed = 0;
};

std::size_t next_power_of_two(std::size_t n);

// Sketch row count ceil(c_sk * eps^-2 * d * log^e(n/delta)) with natural log,
// clamped to [1, n_pad].
std::size_t sketch_dim(std::size_t d, std::size_t n, double eps_ose, double delta_ose,
                       double c_sk, double log_exponent = 2.0);

// The same formula without the upper clamp.
std::size_t sketch_dim_unclamped(std::size_t d, std::size_t n, double eps_ose,
                                 double delta_ose, double c_sk,
                                 double log_exponent = 2.0);

// Pure function of (n_input, m_sk, seed). Draw order: n_pad sign bits (high
// bit of each u64), then m_sk row indices.
SrhtOperator srht_new(std::size_t n_input, std::size_t m_sk, std::uint64_t seed);

// In-place unnormalized Walsh-Hadamard transform; length must be a power of
// two. Applying twice multiplies by the length.
void fwht_inplace(std::span<double> v);

// S * a, column by column: pad, sign-flip, fwht, gather sampled rows, scale.
DenseMat srht_apply(const SrhtOperator& s, const DenseMat& a);

}  // namespace fastmc
