#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastmc/dense_mat.hpp"
#include "fastmc/observed.hpp"
#include "fastmc/solver.hpp"
#include "fastmc/synth.hpp"

namespace fastmc {

struct CompletionConfig {
  std::size_t k = 1;
  double eps = 1e-6;    // final accuracy target
  double delta = 0.01;  // failure probability
  double p = 1.0;       // sampling probability echo
  std::size_t t_rounds = 0;  // 0 = auto: ceil(log4(1/eps)) + 2
  double mu = 3.0;           // incoherence parameter used for clipping
  double c_sample = 1.0;
  std::size_t init_sweeps = 50;
  // eps0 = eps / (n * kappa_hat)^eps0_power for the per-round regressions.
  double eps0_power = 2.0;
  char tau_denominator = 'n';  // 'n' (as defined) or 'm' (row-count variant)
  SolverConfig solver;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FactorPair {
  DenseMat u_hat;    // raw regression output, m x k
  DenseMat v_hat;    // raw regression output, n x k
  DenseMat u_ortho;  // orthonormal basis of u_hat
  DenseMat v_ortho;  // orthonormal basis of v_hat
};

struct RoundStats {
  std::size_t round = 0;
  std::optional<double> dist_u;      // present only with ground truth
  std::optional<double> dist_v;
  std::optional<double> frob_error;  // ||M - u_hat v_ortho^T||_F
  double residual_on_omega = 0.0;
  double incoherence_u = 0.0;  // of u_ortho after the round
  double wall_time_ms = 0.0;
};

struct ConvergenceReport {
  std::vector<RoundStats> per_round;
  std::vector<std::size_t> omega_sizes;  // per partition
  std::optional<double> final_frob_error;
  std::optional<double> init_dist_u;
  double kappa_hat = 1.0;  // condition estimate from the initialization SVD
  double init_subspace_residual = 0.0;
  bool init_rank_completed = false;
  std::vector<std::string> warnings;
  double wall_time_ms_total = 0.0;
  double wall_time_ms_multireg = 0.0;
};

struct CompletionResult {
  FactorPair factors;
  ConvergenceReport report;
};

// Independent Bernoulli(p) sample of the entries of the planted matrix;
// deterministic in seed, drawn column-major.
ObservedEntries sample_omega(std::size_t m, std::size_t n, double p, std::uint64_t seed,
                             const GroundTruth& gt);
ObservedEntries sample_omega(const DenseMat& m_full, double p, std::uint64_t seed);

// 2 t_rounds + 1 disjoint subsets covering omega, each entry assigned
// uniformly; per-column sorted structure is preserved.
std::vector<ObservedEntries> partition_omega(const ObservedEntries& omega,
                                             std::size_t t_rounds, std::uint64_t seed);

// 2 t_rounds + 1 independent Bernoulli samples of the planted matrix, sized
// so the expected total draw count across subsets is nnz_budget. This is the
// with-replacement form of the sample split: entries may repeat across
// subsets, which is the only way a budget above m*n is realizable, and it
// keeps the rounds independent exactly as the disjoint partition would.
std::vector<ObservedEntries> sample_round_sets(std::size_t m, std::size_t n,
                                               double nnz_budget, std::size_t t_rounds,
                                               std::uint64_t seed,
                                               const GroundTruth& gt);

struct InitFactor {
  DenseMat u0;      // orthonormal
  DenseMat u_hat0;  // clipped top-k factor before orthonormalization
  std::vector<double> sigma;
  bool rank_completed = false;  // random directions were needed
  double subspace_residual = 0.0;
};

// Top-k left factor of (1/p) * omega0, rows with norm above
// tau = 2 mu sqrt(k)/sqrt(n) zeroed, then orthonormalized. Best effort: rank
// deficiency after clipping is repaired with random directions.
InitFactor init_factor(const ObservedEntries& omega0, double p, std::size_t k, double mu,
                       std::size_t sweeps, char tau_denominator = 'n',
                       std::uint64_t seed = 0x5EED0001ull);

// The full alternating-minimization driver: partition, spectral init with
// clipping, then t_rounds of per-column regressions alternating between the
// two factors. Ground truth, when given, feeds diagnostics only.
CompletionResult complete(const ObservedEntries& omega, const CompletionConfig& cfg,
                          const GroundTruth* ground_truth = nullptr);

// Same driver on pre-built round subsets (sample_round_sets or a custom
// split). parts[0] feeds the initialization; round t consumes parts[2t-1] and
// parts[2t]. Requires parts.size() == 2 cfg.t_rounds + 1. residual_on_omega
// is evaluated against residual_set when given, else against parts[0].
CompletionResult complete_with_parts(const std::vector<ObservedEntries>& parts,
                                     const CompletionConfig& cfg,
                                     const GroundTruth* ground_truth = nullptr,
                                     const ObservedEntries* residual_set = nullptr);

double delta_2k(std::size_t k, double sigma1, double sigmak);

// min(1, C (sigma1/sigmak)^2 mu^2 k^2.5 log(n) log(k frob_m / eps) / (m d2k^2)).
double sampling_probability(std::size_t m, std::size_t n, std::size_t k, double mu,
                            double sigma1, double sigmak, double frob_m, double eps,
                            double c_sample);

}  // namespace fastmc
