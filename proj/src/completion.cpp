#include "fastmc/completion.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "fastmc/linalg.hpp"
#include "fastmc/metrics.hpp"
#include "fastmc/multireg.hpp"
#include "fastmc/rng.hpp"

namespace fastmc {

void CompletionConfig::validate() const {
  if (k < 1) throw std::invalid_argument("CompletionConfig: k must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("CompletionConfig: eps must be positive");
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("CompletionConfig: p must be in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("CompletionConfig: delta must be in (0, 1)");
  if (tau_denominator != 'n' && tau_denominator != 'm')
    throw std::invalid_argument("CompletionConfig: tau_denominator must be 'n' or 'm'");
  if (init_sweeps < 1)
    throw std::invalid_argument("CompletionConfig: init_sweeps must be >= 1");
}

ObservedEntries sample_omega(std::size_t m, std::size_t n, double p, std::uint64_t seed,
                             const GroundTruth& gt) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_omega: p must be in (0, 1]");
  if (gt.u_star.rows() != m || gt.v_star.rows() != n)
    throw DimensionMismatch("sample_omega: ground truth shape mismatch");
  SplitMix64 rng(seed);
  std::vector<std::size_t> col_ptr(n + 1, 0);
  std::vector<std::size_t> row_idx;
  std::vector<double> values;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.next_double() < p) {
        row_idx.push_back(i);
        values.push_back(entry_oracle(gt, i, j));
      }
    }
    col_ptr[j + 1] = row_idx.size();
  }
  return ObservedEntries::from_csc(m, n, std::move(col_ptr), std::move(row_idx),
                                   std::move(values));
}

ObservedEntries sample_omega(const DenseMat& m_full, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_omega: p must be in (0, 1]");
  SplitMix64 rng(seed);
  std::size_t m = m_full.rows(), n = m_full.cols();
  std::vector<std::size_t> col_ptr(n + 1, 0);
  std::vector<std::size_t> row_idx;
  std::vector<double> values;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.next_double() < p) {
        row_idx.push_back(i);
        values.push_back(m_full(i, j));
      }
    }
    col_ptr[j + 1] = row_idx.size();
  }
  return ObservedEntries::from_csc(m, n, std::move(col_ptr), std::move(row_idx),
                                   std::move(values));
}

std::vector<ObservedEntries> partition_omega(const ObservedEntries& omega,
                                             std::size_t t_rounds, std::uint64_t seed) {
  if (t_rounds < 1) throw std::invalid_argument("partition_omega: t_rounds must be >= 1");
  std::size_t parts = 2 * t_rounds + 1;
  SplitMix64 rng(seed);

  struct Builder {
    std::vector<std::size_t> col_ptr;
    std::vector<std::size_t> row_idx;
    std::vector<double> values;
  };
  std::vector<Builder> builders(parts);
  for (auto& b : builders) b.col_ptr.assign(omega.cols() + 1, 0);

  for (std::size_t j = 0; j < omega.cols(); ++j) {
    for (std::size_t e = omega.col_begin(j); e < omega.col_end(j); ++e) {
      std::size_t s = rng.next_below(parts);
      builders[s].row_idx.push_back(omega.row_idx()[e]);
      builders[s].values.push_back(omega.values()[e]);
    }
    for (auto& b : builders) b.col_ptr[j + 1] = b.row_idx.size();
  }

  std::vector<ObservedEntries> out;
  out.reserve(parts);
  for (auto& b : builders)
    out.push_back(ObservedEntries::from_csc(omega.rows(), omega.cols(),
                                            std::move(b.col_ptr), std::move(b.row_idx),
                                            std::move(b.values)));
  return out;
}

InitFactor init_factor(const ObservedEntries& omega0, double p, std::size_t k, double mu,
                       std::size_t sweeps, char tau_denominator, std::uint64_t seed) {
  if (!(p > 0.0)) throw std::invalid_argument("init_factor: p must be positive");
  std::size_t m = omega0.rows(), n = omega0.cols();
  if (k > std::min(m, n)) throw DimensionMismatch("init_factor: k out of range");

  SvdFactors top = truncated_svd(omega0.scaled(1.0 / p), k, sweeps,
                                 SplitMix64::split(seed, 11));

  double den = static_cast<double>(tau_denominator == 'm' ? m : n);
  double tau = 2.0 * mu * std::sqrt(static_cast<double>(k)) / std::sqrt(den);

  InitFactor out;
  out.sigma = top.s;
  out.subspace_residual = top.subspace_residual;
  out.u_hat0 = top.u;
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += out.u_hat0(i, j) * out.u_hat0(i, j);
    if (std::sqrt(acc) > tau)
      for (std::size_t j = 0; j < k; ++j) out.u_hat0(i, j) = 0.0;
  }
  out.u0 = orthonormal_completion(out.u_hat0, SplitMix64::split(seed, 12),
                                  &out.rank_completed);
  return out;
}

namespace {

double residual_on_support(const ObservedEntries& omega, const DenseMat& u,
                           const DenseMat& v) {
  std::size_t k = u.cols();
  double acc = 0.0;
  for (std::size_t j = 0; j < omega.cols(); ++j) {
    const double* vrow = v.data() + j * k;
    for (std::size_t e = omega.col_begin(j); e < omega.col_end(j); ++e) {
      const double* urow = u.data() + omega.row_idx()[e] * k;
      double pred = 0.0;
      for (std::size_t l = 0; l < k; ++l) pred += urow[l] * vrow[l];
      double d = omega.values()[e] - pred;
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

// ||M - U V^T||_F via the k x k Gram identities; M never materializes.
double frob_error_vs_truth(const GroundTruth& gt, const DenseMat& u, const DenseMat& v) {
  std::size_t k = gt.sigma_star.size();
  DenseMat a1 = gt.u_star.transpose_multiply(u);  // k x k
  DenseMat a2 = v.transpose_multiply(gt.v_star);  // k x k
  DenseMat gu = u.transpose_multiply(u);
  DenseMat gv = v.transpose_multiply(v);

  double m_norm2 = 0.0;
  for (double s : gt.sigma_star) m_norm2 += s * s;
  double cross = 0.0;  // tr(a2^T? ...) = <M, U V^T> = tr(V^T V* S U*^T U)
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t l = 0; l < k; ++l)
      cross += a2(l, i) * gt.sigma_star[i] * a1(i, l);
  double uv_norm2 = 0.0;  // tr((U^T U)(V^T V))
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t l = 0; l < k; ++l) uv_norm2 += gu(i, l) * gv(l, i);
  return std::sqrt(std::max(0.0, m_norm2 - 2.0 * cross + uv_norm2));
}

}  // namespace

std::vector<ObservedEntries> sample_round_sets(std::size_t m, std::size_t n,
                                               double nnz_budget, std::size_t t_rounds,
                                               std::uint64_t seed,
                                               const GroundTruth& gt) {
  if (t_rounds < 1)
    throw std::invalid_argument("sample_round_sets: t_rounds must be >= 1");
  if (!(nnz_budget > 0.0))
    throw std::invalid_argument("sample_round_sets: budget must be positive");
  std::size_t count = 2 * t_rounds + 1;
  double q = nnz_budget / (static_cast<double>(m) * static_cast<double>(n) *
                           static_cast<double>(count));
  q = std::min(q, 1.0);
  std::vector<ObservedEntries> parts;
  parts.reserve(count);
  for (std::size_t t = 0; t < count; ++t)
    parts.push_back(sample_omega(m, n, q, SplitMix64::split(seed, t), gt));
  return parts;
}

CompletionResult complete(const ObservedEntries& omega, const CompletionConfig& cfg,
                          const GroundTruth* ground_truth) {
  cfg.validate();
  std::size_t t_rounds = cfg.t_rounds;
  if (t_rounds == 0) {
    double auto_t = std::ceil(std::log(1.0 / std::min(cfg.eps, 0.25)) / std::log(4.0));
    t_rounds = static_cast<std::size_t>(std::max(1.0, auto_t)) + 2;
  }
  CompletionConfig resolved = cfg;
  resolved.t_rounds = t_rounds;
  std::vector<ObservedEntries> parts =
      partition_omega(omega, t_rounds, SplitMix64::split(cfg.seed, 1));
  return complete_with_parts(parts, resolved, ground_truth, &omega);
}

CompletionResult complete_with_parts(const std::vector<ObservedEntries>& parts,
                                     const CompletionConfig& cfg,
                                     const GroundTruth* ground_truth,
                                     const ObservedEntries* residual_set) {
  auto t_total0 = std::chrono::steady_clock::now();
  cfg.validate();
  std::size_t t_rounds = cfg.t_rounds;
  if (t_rounds < 1 || parts.size() != 2 * t_rounds + 1)
    throw DimensionMismatch("complete_with_parts: need 2 t_rounds + 1 subsets");
  std::size_t m = parts[0].rows(), n = parts[0].cols(), k = cfg.k;
  for (const auto& part : parts)
    if (part.rows() != m || part.cols() != n)
      throw DimensionMismatch("complete_with_parts: subset shapes differ");
  if (k > std::min(m, n)) throw DimensionMismatch("complete: k out of range");
  if (ground_truth &&
      (ground_truth->u_star.rows() != m || ground_truth->v_star.rows() != n ||
       ground_truth->sigma_star.size() != k))
    throw DimensionMismatch("complete: ground truth shape mismatch");
  const ObservedEntries& residual_ref = residual_set ? *residual_set : parts[0];

  CompletionResult out;
  ConvergenceReport& rep = out.report;
  for (const auto& part : parts) rep.omega_sizes.push_back(part.nnz());

  double mn = static_cast<double>(m) * static_cast<double>(n);
  double p0 = std::max(static_cast<double>(parts[0].nnz()), 1.0) / mn;
  InitFactor init = init_factor(parts[0], p0, k, cfg.mu, cfg.init_sweeps,
                                cfg.tau_denominator, SplitMix64::split(cfg.seed, 2));
  rep.init_rank_completed = init.rank_completed;
  rep.init_subspace_residual = init.subspace_residual;
  if (init.rank_completed)
    rep.warnings.push_back("initialization was rank deficient after clipping");

  double sig_top = init.sigma.empty() ? 1.0 : init.sigma.front();
  double sig_low = init.sigma.empty() ? 1.0 : init.sigma.back();
  rep.kappa_hat = sig_low > 1e-12 * sig_top && sig_low > 0.0 ? sig_top / sig_low : 1e12;
  if (rep.kappa_hat < 1.0) rep.kappa_hat = 1.0;

  double eps0 = cfg.eps / std::pow(static_cast<double>(n) * rep.kappa_hat,
                                   cfg.eps0_power);
  eps0 = std::min(std::max(eps0, 1e-300), 0.0999);
  double delta0 = cfg.delta / (4.0 * static_cast<double>(t_rounds) *
                               static_cast<double>(n));
  delta0 = std::min(std::max(delta0, 1e-300), 0.0999);

  DenseMat u_ortho = init.u0;
  DenseMat u_hat = init.u_hat0;
  DenseMat v_hat(n, k), v_ortho(n, k);

  if (ground_truth)
    rep.init_dist_u = principal_dist(u_ortho, ground_truth->u_star);

  MultiRegOptions mr_opts;
  mr_opts.force_sketch = cfg.solver.force_sketch;
  mr_opts.max_iter = cfg.solver.max_iter;

  for (std::size_t t = 1; t <= t_rounds; ++t) {
    auto t_round0 = std::chrono::steady_clock::now();
    RoundStats stats;
    stats.round = t;

    MultiRegResult mr_v = fast_mult_reg(parts[2 * t - 1], u_ortho, eps0, delta0,
                                        SplitMix64::split(cfg.seed, 1000 + t), mr_opts);
    v_hat = std::move(mr_v.x);
    v_hat.require_finite("complete: v update");
    v_ortho = orthonormal_completion(v_hat, SplitMix64::split(cfg.seed, 2000 + t));

    MultiRegResult mr_u =
        fast_mult_reg(parts[2 * t].transposed(), v_ortho, eps0, delta0,
                      SplitMix64::split(cfg.seed, 3000 + t), mr_opts);
    u_hat = std::move(mr_u.x);
    u_hat.require_finite("complete: u update");
    u_ortho = orthonormal_completion(u_hat, SplitMix64::split(cfg.seed, 4000 + t));

    rep.wall_time_ms_multireg +=
        mr_v.report.wall_time_ms + mr_u.report.wall_time_ms;
    if (mr_v.report.skipped_columns.size() * 2 > n)
      rep.warnings.push_back("round " + std::to_string(t) +
                             ": over half of the columns had empty support");
    if (mr_u.report.skipped_columns.size() * 2 > m)
      rep.warnings.push_back("round " + std::to_string(t) +
                             ": over half of the rows had empty support");

    stats.residual_on_omega = residual_on_support(residual_ref, u_hat, v_ortho);
    stats.incoherence_u = incoherence(u_ortho);
    if (ground_truth) {
      stats.dist_u = principal_dist(u_ortho, ground_truth->u_star);
      stats.dist_v = principal_dist(v_ortho, ground_truth->v_star);
      stats.frob_error = frob_error_vs_truth(*ground_truth, u_hat, v_ortho);
    }
    auto t_round1 = std::chrono::steady_clock::now();
    stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(t_round1 - t_round0).count();
    rep.per_round.push_back(std::move(stats));
  }

  if (ground_truth && !rep.per_round.empty())
    rep.final_frob_error = rep.per_round.back().frob_error;

  out.factors = FactorPair{std::move(u_hat), std::move(v_hat), std::move(u_ortho),
                           std::move(v_ortho)};
  auto t_total1 = std::chrono::steady_clock::now();
  rep.wall_time_ms_total =
      std::chrono::duration<double, std::milli>(t_total1 - t_total0).count();
  return out;
}

double delta_2k(std::size_t k, double sigma1, double sigmak) {
  if (k < 1 || !(sigma1 > 0.0) || !(sigmak > 0.0) || sigmak > sigma1)
    throw std::invalid_argument("delta_2k: need k >= 1 and 0 < sigmak <= sigma1");
  return 0.01 * (1.0 / static_cast<double>(k)) * sigmak / sigma1;
}

double sampling_probability(std::size_t m, std::size_t n, std::size_t k, double mu,
                            double sigma1, double sigmak, double frob_m, double eps,
                            double c_sample) {
  if (!(eps > 0.0) || !(frob_m > 0.0) ||
      eps >= static_cast<double>(k) * frob_m)
    throw std::invalid_argument("sampling_probability: need 0 < eps < k * frob_m");
  double d2k = delta_2k(k, sigma1, sigmak);
  double kd = static_cast<double>(k);
  double value = c_sample * std::pow(sigma1 / sigmak, 2.0) * mu * mu *
                 std::pow(kd, 2.5) * std::log(static_cast<double>(n)) *
                 std::log(kd * frob_m / eps) /
                 (static_cast<double>(m) * d2k * d2k);
  return std::min(1.0, value);
}

}  // namespace fastmc
