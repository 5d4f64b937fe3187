#include "fastmc/metrics.hpp"

#include <cmath>
#include <limits>

#include "fastmc/linalg.hpp"
#include "fastmc/rng.hpp"

namespace fastmc {

namespace {

constexpr double kOrthoTol = 1e-8;

bool is_orthonormal(const DenseMat& u, double tol) {
  DenseMat g = u.transpose_multiply(u);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(g(i, j) - want) > tol) return false;
    }
  return true;
}

double spectral_of(const DenseMat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  SvdFactors f = svd_full(a);
  return f.s.empty() ? 0.0 : f.s.front();
}

// W - U (U^T W): the projection of W onto the complement of col(U).
DenseMat complement_part(const DenseMat& u, const DenseMat& w) {
  return w - u.multiply(u.transpose_multiply(w));
}

}  // namespace

double principal_dist(const DenseMat& a, const DenseMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("principal_dist: shape mismatch");
  DenseMat u = qr_householder(a).q;  // RankDeficient propagates
  DenseMat w = qr_householder(b).q;
  return spectral_of(complement_part(u, w));
}

SubspaceGeometry subspace_geometry(const DenseMat& v, const DenseMat& u) {
  if (v.rows() != u.rows() || v.cols() != u.cols())
    throw DimensionMismatch("subspace_geometry: shape mismatch");
  if (!is_orthonormal(v, kOrthoTol) || !is_orthonormal(u, kOrthoTol))
    throw NotOrthonormal("subspace_geometry: inputs must have orthonormal columns");

  SubspaceGeometry g;
  DenseMat vtu = v.transpose_multiply(u);  // k x k
  SvdFactors f = svd_full(vtu);
  double cos_t = f.s.empty() ? 0.0 : f.s.back();
  g.cos_theta = std::min(cos_t, 1.0);
  g.sin_theta = std::min(spectral_of(complement_part(v, u)), 1.0);
  g.dist = principal_dist(v, u);

  if (g.cos_theta > 1e-300) {
    // tan = ||V_perp^T U (V^T U)^-1||, with the inverse taken through the SVD
    // of V^T U.
    std::size_t k = vtu.rows();
    DenseMat inv(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < k; ++l)
          acc += f.v(i, l) * f.u(j, l) / f.s[l];
        inv(i, j) = acc;
      }
    g.tan_theta = spectral_of(complement_part(v, u).multiply(inv));
  } else {
    g.tan_theta = std::numeric_limits<double>::infinity();
  }

  // Procrustes rotation Q = A B^T from the SVD of V^T U.
  DenseMat q_rot = f.u.multiply(f.v.transpose());
  g.dist_c_ub = spectral_of(v.multiply(q_rot) - u);
  return g;
}

double incoherence(const DenseMat& u) {
  if (!is_orthonormal(u, kOrthoTol))
    throw NotOrthonormal("incoherence: input must have orthonormal columns");
  std::size_t m = u.rows(), k = u.cols();
  double max_row = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += u(i, j) * u(i, j);
    max_row = std::max(max_row, acc);
  }
  return std::sqrt(max_row * static_cast<double>(m) / static_cast<double>(k));
}

std::vector<double> leverage_scores(const DenseMat& x) {
  QrFactors f = qr_householder(x);  // RankDeficient propagates
  std::size_t m = x.rows(), k = x.cols();
  std::vector<double> out(m, 0.0);
  std::vector<double> row(k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) row[j] = x(i, j);
    // l_i = || R^-T x_i ||^2 since X^T X = R^T R.
    std::vector<double> z = solve_upper_transposed(f.r_tri, row);
    double acc = 0.0;
    for (double v : z) acc += v * v;
    out[i] = acc;
  }
  return out;
}

double condition_number(const DenseMat& x) {
  SvdFactors f = svd_full(x);
  double smin = f.s.empty() ? 0.0 : f.s.back();
  double smax = f.s.empty() ? 0.0 : f.s.front();
  if (smin < 1e-12 * smax || smin < 1e-300)
    throw RankDeficient("condition_number: rank deficient input", f.s.size() - 1);
  return smax / smin;
}

LeveragePerturbation check_incoherence_perturbation(const DenseMat& a,
                                                    const DenseMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("check_incoherence_perturbation: shape mismatch");
  SvdFactors fa = svd_full(a);
  double sigma_min = fa.s.back();
  double kappa = fa.s.front() / sigma_min;
  double gap = spectral_of(a - b);
  if (!(sigma_min > 0.0) || gap > 0.5 * sigma_min)
    throw PreconditionViolated(
        "check_incoherence_perturbation: need ||A-B|| <= sigma_min(A)/2");

  std::vector<double> la = leverage_scores(a);
  std::vector<double> lb = leverage_scores(b);
  LeveragePerturbation out;
  out.lhs.resize(la.size());
  for (std::size_t i = 0; i < la.size(); ++i)
    out.lhs[i] = std::abs(std::sqrt(la[i]) - std::sqrt(lb[i]));
  out.rhs = 75.0 * gap * std::pow(kappa, 4.0) / sigma_min;
  return out;
}

std::pair<double, double> check_dist_by_spectral(const DenseMat& x, const DenseMat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DimensionMismatch("check_dist_by_spectral: shape mismatch");
  double smin_x = svd_full(x).s.back();
  double smin_y = svd_full(y).s.back();
  double gap = spectral_of(x - y);
  if (gap * gap > smin_x * smin_y)
    throw PreconditionViolated(
        "check_dist_by_spectral: need ||X-Y||^2 <= sigma_min(X) sigma_min(Y)");
  double lhs = principal_dist(x, y);
  double rhs = 4.0 * gap / std::sqrt(smin_x * smin_y);
  return {lhs, rhs};
}

std::pair<double, double> check_pinv_perturbation(const DenseMat& a, const DenseMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("check_pinv_perturbation: shape mismatch");
  auto pinv = [](const DenseMat& x) {
    SvdFactors f = svd_full(x);
    double cutoff = 1e-12 * (f.s.empty() ? 0.0 : f.s.front());
    if (f.s.back() <= cutoff || f.s.back() < 1e-300)
      throw RankDeficient("check_pinv_perturbation: rank deficient input",
                          f.s.size() - 1);
    // X^+ = V diag(1/s) U^T, cols(x) x rows(x)
    std::size_t k = f.s.size();
    DenseMat out(x.cols(), x.rows());
    for (std::size_t i = 0; i < x.cols(); ++i)
      for (std::size_t j = 0; j < x.rows(); ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < k; ++l) acc += f.v(i, l) * f.u(j, l) / f.s[l];
        out(i, j) = acc;
      }
    return out;
  };
  DenseMat pa = pinv(a);
  DenseMat pb = pinv(b);
  double na = spectral_of(pa), nb = spectral_of(pb);
  double lhs = spectral_of(pa - pb);
  double rhs = 2.0 * std::max(na * na, nb * nb) * spectral_of(a - b);
  return {lhs, rhs};
}

std::pair<double, double> check_fourth_moment(const DenseMat& u_t,
                                              const DenseMat& u_star, double mu2,
                                              double mu, std::size_t trials,
                                              std::uint64_t seed) {
  if (u_t.rows() != u_star.rows() || u_t.cols() != u_star.cols())
    throw DimensionMismatch("check_fourth_moment: shape mismatch");
  if (incoherence(u_t) > mu2 + 1e-9 || incoherence(u_star) > mu + 1e-9)
    throw PreconditionViolated("check_fourth_moment: mu bounds do not hold");

  std::size_t m = u_t.rows(), k = u_t.cols();
  double mk = static_cast<double>(m) / static_cast<double>(k);

  auto max_row_dir = [&](const DenseMat& u) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += u(i, j) * u(i, j);
      if (acc > best_norm) {
        best_norm = acc;
        best = i;
      }
    }
    std::vector<double> dir(k, 0.0);
    double nrm = std::sqrt(best_norm);
    if (nrm > 0.0)
      for (std::size_t j = 0; j < k; ++j) dir[j] = u(best, j) / nrm;
    else
      dir[0] = 1.0;
    return dir;
  };

  auto eval = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s4 = 0.0, s22 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double dxt = 0.0, dys = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        dxt += x[j] * u_t(i, j);
        dys += y[j] * u_star(i, j);
      }
      double dxt2 = dxt * dxt;
      s4 += dxt2 * dxt2;
      s22 += dys * dys * dxt2;
    }
    return std::make_pair(s4 * mk / (mu2 * mu2), s22 * mk / (mu * mu));
  };

  SplitMix64 rng(seed);
  auto random_unit = [&]() {
    std::vector<double> x(k);
    double nrm = 0.0;
    do {
      for (double& v : x) v = rng.next_gaussian();
      nrm = vec_norm(x);
    } while (nrm == 0.0);
    for (double& v : x) v /= nrm;
    return x;
  };

  auto [w4, w22] = eval(max_row_dir(u_t), max_row_dir(u_star));
  for (std::size_t t = 0; t < trials; ++t) {
    auto [r4, r22] = eval(random_unit(), random_unit());
    w4 = std::max(w4, r4);
    w22 = std::max(w22, r22);
  }
  return {w4, w22};
}

}  // namespace fastmc
