#pragma once

#include <cstdint>
#include <vector>

#include "fastmc/dense_mat.hpp"
#include "fastmc/observed.hpp"

namespace fastmc {

// Thin QR of a tall matrix: q has orthonormal columns (rows x cols), r_tri is
// cols x cols upper triangular with exact zeros below the diagonal, and
// q * r_tri reconstructs the input.
struct QrFactors {
  DenseMat q;
  DenseMat r_tri;
};

struct SvdFactors {
  DenseMat u;
  std::vector<double> s;  // nonincreasing, nonnegative
  DenseMat v;
  // Filled by truncated_svd: ||A^T u - v diag(s)||_F / ||s||_2. Best-effort
  // diagnostic, not an error channel.
  double subspace_residual = 0.0;
};

// Householder QR, rows >= cols. Throws RankDeficient (with the offending
// column index) when a diagonal of r_tri falls below 1e-12 of the largest.
QrFactors qr_householder(const DenseMat& a);

// Same contract as qr_householder; the name marks call sites that only want
// the orthonormal basis.
QrFactors orthonormalize(const DenseMat& a);

// Orthonormal basis of col(a) with rank-deficient directions completed by
// random vectors. Never throws for rank reasons; sets *completed when random
// directions were needed.
DenseMat orthonormal_completion(const DenseMat& a, std::uint64_t seed,
                                bool* completed = nullptr);

// Back substitution r_tri * x = y. Throws SingularTriangular when a diagonal
// magnitude is below 1e-300.
std::vector<double> solve_upper_triangular(const DenseMat& r_tri,
                                           const std::vector<double>& y);

// Forward substitution r_tri^T * x = y on the stored upper factor.
std::vector<double> solve_upper_transposed(const DenseMat& r_tri,
                                           const std::vector<double>& y);

// Full SVD by one-sided Jacobi. u is rows x min(rows, cols) with orthonormal
// columns (zero singular directions completed), s sorted nonincreasing.
SvdFactors svd_full(const DenseMat& a);

// Top-k factors of a sparse matrix by block power iteration with
// re-orthonormalization each sweep. Non-convergence is reported through
// subspace_residual, not raised.
SvdFactors truncated_svd(const ObservedEntries& a, std::size_t k, std::size_t sweeps,
                         std::uint64_t seed = 0x5EED5EED5EED5EEDull);

// Power-iteration estimate of sigma_max, deterministic. Always a lower bound
// up to the requested relative tolerance.
double spectral_norm(const DenseMat& a, double tol = 1e-10);

// Minimum-norm least-squares solution via SVD with relative cutoff on the
// singular values.
std::vector<double> svd_min_norm_solve(const DenseMat& a, const std::vector<double>& b,
                                       double rel_cutoff = 1e-12);

}  // namespace fastmc
