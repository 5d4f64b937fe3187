#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fastmc/dense_mat.hpp"
#include "fastmc/observed.hpp"

namespace fastmc {

struct MultiRegReport {
  std::vector<double> per_column_residuals;
  std::vector<std::size_t> skipped_columns;  // empty support
  std::size_t total_gathered_rows = 0;       // sum of per-column support sizes
  double wall_time_ms = 0.0;
};

struct MultiRegOptions {
  double c_pow = 1.0;  // exponent in the per-column accuracy split
  bool force_sketch = false;
  std::size_t max_iter = 200;
};

struct MultiRegResult {
  DenseMat x;  // cols(mask) x cols(y)
  MultiRegReport report;
};

// Rows of y at the support of column j, plus the matching observed values.
std::pair<DenseMat, std::vector<double>> gather_column(const ObservedEntries& mask_vals,
                                                       const DenseMat& y, std::size_t j);

// Per-column regression accuracy eps0^2 * (n * kappa0)^(-2 c_pow); the square
// absorbs the square-root loss when converting residual accuracy to solution
// accuracy.
double eps1_for_column(double eps0, std::size_t n, double kappa0, double c_pow);

// Weighted multiple-response regression restricted to the observation
// support: row j of the result minimizes ||y_Kj x - m_Kj||_2 over the support
// K_j of column j. Only supported rows of y are ever touched, so the gather
// cost is proportional to nnz. Columns with empty support get a zero row.
MultiRegResult fast_mult_reg(const ObservedEntries& mask_vals, const DenseMat& y,
                             double eps0, double delta0, std::uint64_t seed,
                             const MultiRegOptions& opts = {});

}  // namespace fastmc
