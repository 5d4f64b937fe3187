#pragma once

#include <cstdint>
#include <vector>

#include "fastmc/dense_mat.hpp"

namespace fastmc {

struct SolverConfig {
  double eps1 = 1e-8;    // target residual accuracy, in (0, 0.1)
  double delta1 = 0.01;  // failure probability, in (0, 0.1)
  double eps_ose = 0.01;
  double c_sk = 0.05;
  double c_iter = 1.5;  // iteration count is ceil(c_iter * ln(1/eps1))
  std::size_t max_iter = 200;
  std::uint64_t seed = 0;
  // Exponent on log(n/delta) in the sketch-size formula.
  double log_exponent = 2.0;
  // Clamp the sketch row count to the padded length. Disabling it lets the
  // sketch grow past the input length, which keeps the preconditioner within
  // the eps_ose distortion band instead of degrading to exact QR.
  bool clamp_sketch = true;
  // Skip the small-problem direct path even when n <= 4 d.
  bool force_sketch = false;
  // Record the preconditioned iterates x_t (test instrumentation).
  bool record_iterates = false;

  void validate() const;
};

struct RegressionResult {
  std::vector<double> x;
  double residual_norm = 0.0;  // recomputed from the returned x
  std::size_t iterations = 0;
  bool preconditioned = false;  // sketched path vs direct path
  // Preconditioned-space iterates x_0..x_T when record_iterates is set.
  std::vector<std::vector<double>> iterate_history;
};

// min ||a x - b||_2 to (1 + eps1) of optimal: sketch, QR-precondition, then
// gradient iterations on the preconditioned system. Falls back to a dense
// solve when n <= 4 d or the sketched QR is rank deficient.
RegressionResult high_precision_reg(const DenseMat& a, const std::vector<double>& b,
                                    const SolverConfig& cfg);

// Weighted objective ||v||_w^2 = sum w_i v_i^2, reduced to the unweighted
// problem by scaling rows with sqrt(w_i); zero-weight rows are dropped.
RegressionResult weighted_reg(const DenseMat& a, const std::vector<double>& b,
                              const std::vector<double>& w, const SolverConfig& cfg);

// Solution-space error bound 2 sqrt(eps1) * opt_residual / sigma_min(a)
// implied by a (1 + eps1)-approximate residual.
double backward_error_bound(const DenseMat& a, double eps1, double opt_residual);

}  // namespace fastmc
