#include "fastmc/multireg.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "fastmc/linalg.hpp"
#include "fastmc/rng.hpp"
#include "fastmc/solver.hpp"

namespace fastmc {

std::pair<DenseMat, std::vector<double>> gather_column(const ObservedEntries& mask_vals,
                                                       const DenseMat& y,
                                                       std::size_t j) {
  if (j >= mask_vals.cols()) throw DimensionMismatch("gather_column: column out of range");
  std::size_t lo = mask_vals.col_begin(j), hi = mask_vals.col_end(j);
  DenseMat sub_y(hi - lo, y.cols());
  std::vector<double> sub_b(hi - lo);
  for (std::size_t e = lo; e < hi; ++e) {
    std::size_t i = mask_vals.row_idx()[e];
    const double* src = y.data() + i * y.cols();
    double* dst = sub_y.data() + (e - lo) * y.cols();
    for (std::size_t l = 0; l < y.cols(); ++l) dst[l] = src[l];
    sub_b[e - lo] = mask_vals.values()[e];
  }
  return {std::move(sub_y), std::move(sub_b)};
}

double eps1_for_column(double eps0, std::size_t n, double kappa0, double c_pow) {
  if (kappa0 < 1.0 || n < 1)
    throw std::invalid_argument("eps1_for_column: need kappa0 >= 1 and n >= 1");
  return eps0 * eps0 * std::pow(static_cast<double>(n) * kappa0, -2.0 * c_pow);
}

MultiRegResult fast_mult_reg(const ObservedEntries& mask_vals, const DenseMat& y,
                             double eps0, double delta0, std::uint64_t seed,
                             const MultiRegOptions& opts) {
  auto t_start = std::chrono::steady_clock::now();
  if (y.rows() != mask_vals.rows())
    throw DimensionMismatch("fast_mult_reg: y rows do not match mask rows");
  if (!(eps0 > 0.0 && eps0 < 0.1))
    throw std::invalid_argument("fast_mult_reg: eps0 must be in (0, 0.1)");
  if (!(delta0 > 0.0 && delta0 < 0.1))
    throw std::invalid_argument("fast_mult_reg: delta0 must be in (0, 0.1)");

  std::size_t m = mask_vals.rows(), n = mask_vals.cols(), k = y.cols();
  MultiRegResult out;
  out.x = DenseMat(n, k);
  out.report.per_column_residuals.assign(n, 0.0);

  if (mask_vals.nnz() == 0) {
    for (std::size_t j = 0; j < n; ++j) out.report.skipped_columns.push_back(j);
    return out;
  }

  // kappa0 = sigma_max(M) / sigma_min(Y); the numerator is unobservable, so
  // use the observed Frobenius mass rescaled by the empirical sampling rate
  // as an upper-bound proxy.
  double p_hat = static_cast<double>(mask_vals.nnz()) /
                 (static_cast<double>(m) * static_cast<double>(n));
  double sigma_max_hat = mask_vals.values_frobenius() / std::sqrt(p_hat);
  SvdFactors ysvd = svd_full(y);
  double sig_min_y = ysvd.s.empty() ? 0.0 : ysvd.s.back();
  double kappa0 =
      sig_min_y > 1e-300 ? std::max(1.0, sigma_max_hat / sig_min_y) : 1e12;

  double eps1 = eps1_for_column(eps0, n, kappa0, opts.c_pow);
  SolverConfig cfg;
  cfg.eps1 = std::min(std::max(eps1, 1e-300), 0.0999);
  cfg.delta1 = std::min(std::max(delta0 / static_cast<double>(n), 1e-300), 0.0999);
  cfg.force_sketch = opts.force_sketch;
  cfg.max_iter = opts.max_iter;

  std::vector<double> unit;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t support = mask_vals.col_size(j);
    if (support == 0) {
      out.report.skipped_columns.push_back(j);
      continue;
    }
    auto [sub_y, sub_b] = gather_column(mask_vals, y, j);
    out.report.total_gathered_rows += support;
    cfg.seed = SplitMix64::split(seed, j);
    unit.assign(support, 1.0);
    RegressionResult res = weighted_reg(sub_y, sub_b, unit, cfg);
    for (std::size_t l = 0; l < k; ++l) out.x(j, l) = res.x[l];
    out.report.per_column_residuals[j] = res.residual_norm;
  }

  auto t_end = std::chrono::steady_clock::now();
  out.report.wall_time_ms =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();
  return out;
}

}  // namespace fastmc
