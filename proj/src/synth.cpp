#include "fastmc/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fastmc/linalg.hpp"
#include "fastmc/metrics.hpp"
#include "fastmc/rng.hpp"

namespace fastmc {

namespace {

DenseMat incoherent_basis(std::size_t rows, std::size_t k, double mu_target,
                          std::uint64_t seed, const char* side) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    DenseMat g = gaussian_matrix(rows, k, SplitMix64::split(seed, attempt));
    DenseMat q;
    try {
      q = qr_householder(g).q;
    } catch (const RankDeficient&) {
      continue;  // essentially impossible for Gaussian draws
    }
    if (incoherence(q) <= mu_target) return q;
  }
  throw IncoherenceUnreachable(std::string("gen_incoherent: mu_target unreachable for ") +
                               side + " factor after 100 rejections");
}

}  // namespace

GroundTruth gen_incoherent(std::size_t m, std::size_t n, std::size_t k, double kappa,
                           double mu_target, std::uint64_t seed) {
  if (k == 0 || k > std::min(m, n))
    throw DimensionMismatch("gen_incoherent: k out of range");
  if (kappa < 1.0) throw std::invalid_argument("gen_incoherent: kappa must be >= 1");
  if (mu_target < 1.0)
    throw std::invalid_argument("gen_incoherent: mu_target must be >= 1");

  GroundTruth gt;
  gt.u_star = incoherent_basis(m, k, mu_target, SplitMix64::split(seed, 1), "left");
  gt.v_star = incoherent_basis(n, k, mu_target, SplitMix64::split(seed, 2), "right");

  gt.sigma_star.resize(k);
  if (k == 1) {
    gt.sigma_star[0] = 1.0;
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      double frac = static_cast<double>(k - 1 - i) / static_cast<double>(k - 1);
      gt.sigma_star[i] = std::pow(kappa, frac);
    }
  }
  gt.kappa = gt.sigma_star.front() / gt.sigma_star.back();
  gt.mu_actual = std::max(incoherence(gt.u_star), incoherence(gt.v_star));
  return gt;
}

double entry_oracle(const GroundTruth& gt, std::size_t i, std::size_t j) {
  if (i >= gt.u_star.rows() || j >= gt.v_star.rows())
    throw DimensionMismatch("entry_oracle: index out of range");
  double acc = 0.0;
  std::size_t k = gt.sigma_star.size();
  const double* urow = gt.u_star.data() + i * k;
  const double* vrow = gt.v_star.data() + j * k;
  for (std::size_t l = 0; l < k; ++l) acc += urow[l] * gt.sigma_star[l] * vrow[l];
  return acc;
}

double ground_truth_frobenius(const GroundTruth& gt) {
  double acc = 0.0;
  for (double s : gt.sigma_star) acc += s * s;
  return std::sqrt(acc);
}

void write_ground_truth(const std::string& dir, const GroundTruth& gt,
                        std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_dmat_file((fs::path(dir) / "u_star.dmat").string(), gt.u_star);
  write_dmat_file((fs::path(dir) / "v_star.dmat").string(), gt.v_star);
  write_dmat_file((fs::path(dir) / "sigma_star.dmat").string(),
                  DenseMat::column(gt.sigma_star));

  nlohmann::json meta;
  meta["k"] = gt.sigma_star.size();
  meta["sigma_star"] = gt.sigma_star;
  meta["mu_actual"] = gt.mu_actual;
  meta["kappa"] = gt.kappa;
  meta["seed"] = seed;
  std::ofstream os(fs::path(dir) / "meta.json");
  if (!os) throw FormatError("cannot open meta.json for writing in " + dir);
  os << meta.dump(2) << '\n';
}

GroundTruth read_ground_truth(const std::string& dir) {
  namespace fs = std::filesystem;
  GroundTruth gt;
  gt.u_star = read_dmat_file((fs::path(dir) / "u_star.dmat").string());
  gt.v_star = read_dmat_file((fs::path(dir) / "v_star.dmat").string());
  DenseMat sig = read_dmat_file((fs::path(dir) / "sigma_star.dmat").string());
  gt.sigma_star = sig.col(0);
  if (gt.sigma_star.empty() || gt.u_star.cols() != gt.sigma_star.size() ||
      gt.v_star.cols() != gt.sigma_star.size())
    throw FormatError("ground truth: inconsistent factor shapes in " + dir);
  std::ifstream is(fs::path(dir) / "meta.json");
  if (is) {
    nlohmann::json meta = nlohmann::json::parse(is);
    gt.mu_actual = meta.value("mu_actual", 0.0);
    gt.kappa = meta.value("kappa", gt.sigma_star.front() / gt.sigma_star.back());
  } else {
    gt.kappa = gt.sigma_star.front() / gt.sigma_star.back();
  }
  return gt;
}

}  // namespace fastmc
