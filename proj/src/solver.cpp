#include "fastmc/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "fastmc/linalg.hpp"
#include "fastmc/sketch.hpp"

namespace fastmc {

void SolverConfig::validate() const {
  if (!(eps1 > 0.0 && eps1 < 0.1))
    throw std::invalid_argument("SolverConfig: eps1 must be in (0, 0.1)");
  if (!(delta1 > 0.0 && delta1 < 0.1))
    throw std::invalid_argument("SolverConfig: delta1 must be in (0, 0.1)");
  if (!(eps_ose > 0.0 && eps_ose < 1.0))
    throw std::invalid_argument("SolverConfig: eps_ose must be in (0, 1)");
  if (!(c_sk > 0.0)) throw std::invalid_argument("SolverConfig: c_sk must be positive");
  if (!(c_iter > 0.0)) throw std::invalid_argument("SolverConfig: c_iter must be positive");
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
}

namespace {

double residual_norm_of(const DenseMat& a, const std::vector<double>& x,
                        const std::vector<double>& b) {
  std::vector<double> ax = a.matvec(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double d = ax[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

RegressionResult direct_solve(const DenseMat& a, const std::vector<double>& b) {
  RegressionResult res;
  if (a.rows() < a.cols()) {
    res.x = svd_min_norm_solve(a, b);  // underdetermined
  } else {
    try {
      QrFactors f = qr_householder(a);
      res.x = solve_upper_triangular(f.r_tri, f.q.transpose_matvec(b));
    } catch (const RankDeficient&) {
      res.x = svd_min_norm_solve(a, b);
    }
  }
  res.residual_norm = residual_norm_of(a, res.x, b);
  res.preconditioned = false;
  return res;
}

}  // namespace

RegressionResult high_precision_reg(const DenseMat& a, const std::vector<double>& b,
                                    const SolverConfig& cfg) {
  cfg.validate();
  std::size_t n = a.rows(), d = a.cols();
  if (n == 0 || d == 0) throw DimensionMismatch("high_precision_reg: empty system");
  if (b.size() != n) throw DimensionMismatch("high_precision_reg: rhs size mismatch");
  a.require_finite("high_precision_reg: a");
  for (double v : b)
    if (!std::isfinite(v)) throw NonFinite("high_precision_reg: b has non-finite entry");

  if (!cfg.force_sketch && n <= 4 * d) return direct_solve(a, b);

  std::size_t m_sk =
      cfg.clamp_sketch
          ? sketch_dim(d, n, cfg.eps_ose, cfg.delta1, cfg.c_sk, cfg.log_exponent)
          : sketch_dim_unclamped(d, n, cfg.eps_ose, cfg.delta1, cfg.c_sk,
                                 cfg.log_exponent);
  if (m_sk < d) return direct_solve(a, b);  // sketch too small to factor
  SrhtOperator op = srht_new(n, m_sk, cfg.seed);

  // Sketch [A | b] jointly so both see the same padding and row sample.
  DenseMat ab(n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) ab(i, j) = a(i, j);
    ab(i, d) = b[i];
  }
  DenseMat sab = srht_apply(op, ab);
  DenseMat sa(m_sk, d);
  std::vector<double> sb(m_sk);
  for (std::size_t i = 0; i < m_sk; ++i) {
    for (std::size_t j = 0; j < d; ++j) sa(i, j) = sab(i, j);
    sb[i] = sab(i, d);
  }

  QrFactors f;
  try {
    f = qr_householder(sa);
  } catch (const RankDeficient&) {
    return direct_solve(a, b);
  }

  // SA R = Q with R = r_tri^-1, so the sketched preconditioned least squares
  // has the closed form x_0 = Q^T S b.
  std::vector<double> x = f.q.transpose_matvec(sb);

  double t1_real = std::ceil(cfg.c_iter * std::log(1.0 / cfg.eps1));
  std::size_t t1 = t1_real < 1.0 ? 1 : static_cast<std::size_t>(t1_real);
  if (t1 > cfg.max_iter) t1 = cfg.max_iter;

  RegressionResult res;
  res.preconditioned = true;
  if (cfg.record_iterates) res.iterate_history.push_back(x);

  for (std::size_t t = 0; t < t1; ++t) {
    // x_{t+1} = x_t + R^T A^T (b - A R x_t)
    std::vector<double> y = solve_upper_triangular(f.r_tri, x);
    std::vector<double> r_vec = a.matvec(y);
    for (std::size_t i = 0; i < n; ++i) r_vec[i] = b[i] - r_vec[i];
    std::vector<double> g = a.transpose_matvec(r_vec);
    std::vector<double> delta = solve_upper_transposed(f.r_tri, g);

    double xnorm = vec_norm(x);
    for (std::size_t j = 0; j < d; ++j) x[j] += delta[j];
    ++res.iterations;
    for (double v : x)
      if (!std::isfinite(v))
        throw NonFinite("high_precision_reg: iterate diverged");
    if (cfg.record_iterates) res.iterate_history.push_back(x);
    if (vec_norm(delta) <= cfg.eps1 * xnorm + 1e-300) break;
  }

  res.x = solve_upper_triangular(f.r_tri, x);
  res.residual_norm = residual_norm_of(a, res.x, b);
  return res;
}

RegressionResult weighted_reg(const DenseMat& a, const std::vector<double>& b,
                              const std::vector<double>& w, const SolverConfig& cfg) {
  std::size_t n = a.rows(), d = a.cols();
  if (w.size() != n || b.size() != n)
    throw DimensionMismatch("weighted_reg: size mismatch");
  for (double wi : w) {
    if (!std::isfinite(wi) || wi < 0.0)
      throw std::invalid_argument("weighted_reg: weights must be nonnegative");
  }

  std::vector<std::size_t> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (w[i] > 0.0) kept.push_back(i);

  if (kept.empty()) {
    // Objective is identically zero; return the zero minimizer.
    RegressionResult res;
    res.x.assign(d, 0.0);
    res.residual_norm = 0.0;
    res.preconditioned = false;
    return res;
  }

  DenseMat at(kept.size(), d);
  std::vector<double> bt(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    double s = std::sqrt(w[kept[r]]);
    for (std::size_t j = 0; j < d; ++j) at(r, j) = s * a(kept[r], j);
    bt[r] = s * b[kept[r]];
  }
  return high_precision_reg(at, bt, cfg);
}

double backward_error_bound(const DenseMat& a, double eps1, double opt_residual) {
  SvdFactors f = svd_full(a);
  double sigma_min = f.s.empty() ? 0.0 : f.s.back();
  if (sigma_min < 1e-300)
    throw SingularMatrix("backward_error_bound: sigma_min vanishes");
  return 2.0 * std::sqrt(eps1) * opt_residual / sigma_min;
}

}  // namespace fastmc
