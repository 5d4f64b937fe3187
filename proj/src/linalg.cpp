#include "fastmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fastmc/rng.hpp"

namespace fastmc {

namespace {

constexpr double kRankTol = 1e-12;

// Householder vectors are stored below the diagonal of `work`, normalized so
// the head entry is 1; `beta` holds the matching 2/||u||^2 coefficients.
struct HouseholderFactors {
  DenseMat work;  // rows x cols, R in the upper triangle
  std::vector<double> beta;
};

HouseholderFactors householder_reduce(const DenseMat& a) {
  std::size_t m = a.rows(), n = a.cols();
  HouseholderFactors hf{a, std::vector<double>(n, 0.0)};
  DenseMat& w = hf.work;
  for (std::size_t j = 0; j < n; ++j) {
    double normx = 0.0;
    for (std::size_t i = j; i < m; ++i) normx += w(i, j) * w(i, j);
    normx = std::sqrt(normx);
    if (normx == 0.0) continue;  // zero column, caught by the rank check
    double alpha = w(j, j) >= 0.0 ? -normx : normx;
    double v0 = w(j, j) - alpha;
    w(j, j) = alpha;
    // v = (v0, w(j+1..m, j)); H = I - (2/||v||^2) v v^T
    double vnorm2 = v0 * v0;
    for (std::size_t i = j + 1; i < m; ++i) vnorm2 += w(i, j) * w(i, j);
    if (vnorm2 == 0.0) continue;
    double beta = 2.0 / vnorm2;
    // Apply to the trailing columns.
    for (std::size_t c = j + 1; c < n; ++c) {
      double dot = v0 * w(j, c);
      for (std::size_t i = j + 1; i < m; ++i) dot += w(i, j) * w(i, c);
      dot *= beta;
      w(j, c) -= dot * v0;
      for (std::size_t i = j + 1; i < m; ++i) w(i, c) -= dot * w(i, j);
    }
    // Store u = v / v0 below the diagonal and the rescaled coefficient, so
    // H = I - (beta v0^2) u u^T with u head implicitly 1.
    for (std::size_t i = j + 1; i < m; ++i) w(i, j) /= v0;
    hf.beta[j] = beta * v0 * v0;
  }
  return hf;
}

DenseMat householder_q(const HouseholderFactors& hf, std::size_t m, std::size_t n) {
  // Accumulate Q = H_0 ... H_{n-1} applied to the first n columns of I.
  // At step j (descending), columns c < j are still untouched unit vectors.
  DenseMat q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t j = n; j-- > 0;) {
    if (hf.beta[j] == 0.0) continue;
    for (std::size_t c = j; c < n; ++c) {
      double dot = q(j, c);
      for (std::size_t i = j + 1; i < m; ++i) dot += hf.work(i, j) * q(i, c);
      dot *= hf.beta[j];
      q(j, c) -= dot;
      for (std::size_t i = j + 1; i < m; ++i) q(i, c) -= dot * hf.work(i, j);
    }
  }
  return q;
}

}  // namespace

QrFactors qr_householder(const DenseMat& a) {
  std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw DimensionMismatch("qr_householder: rows < cols");
  if (n == 0) throw DimensionMismatch("qr_householder: empty matrix");
  a.require_finite("qr_householder");

  HouseholderFactors hf = householder_reduce(a);
  DenseMat q = householder_q(hf, m, n);

  DenseMat r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = hf.work(i, j);

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(r(i, i)) < kRankTol * max_diag || max_diag == 0.0)
      throw RankDeficient("qr_householder: rank deficient at column " + std::to_string(i), i);

  return {std::move(q), std::move(r)};
}

QrFactors orthonormalize(const DenseMat& a) { return qr_householder(a); }

DenseMat orthonormal_completion(const DenseMat& a, std::uint64_t seed, bool* completed) {
  std::size_t m = a.rows(), k = a.cols();
  if (completed) *completed = false;
  DenseMat q(m, k);
  SplitMix64 rng(seed);
  double scale = a.frobenius_norm();
  if (scale == 0.0) scale = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> v = a.col(j);
    for (int attempt = 0; attempt < 64; ++attempt) {
      // Orthogonalize twice against the accepted columns.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < j; ++c) {
          double dot = 0.0;
          for (std::size_t i = 0; i < m; ++i) dot += q(i, c) * v[i];
          for (std::size_t i = 0; i < m; ++i) v[i] -= dot * q(i, c);
        }
      }
      double nrm = vec_norm(v);
      if (nrm > 1e-10 * scale) {
        for (std::size_t i = 0; i < m; ++i) q(i, j) = v[i] / nrm;
        break;
      }
      if (completed) *completed = true;
      for (std::size_t i = 0; i < m; ++i) v[i] = rng.next_gaussian();
      scale = 1.0;  // random candidates have unit-scale norms
    }
  }
  return q;
}

std::vector<double> solve_upper_triangular(const DenseMat& r_tri,
                                           const std::vector<double>& y) {
  std::size_t n = r_tri.rows();
  if (r_tri.cols() != n || y.size() != n)
    throw DimensionMismatch("solve_upper_triangular: shape mismatch");
  std::vector<double> x(y);
  for (std::size_t ii = n; ii-- > 0;) {
    double d = r_tri(ii, ii);
    if (std::abs(d) < 1e-300)
      throw SingularTriangular("solve_upper_triangular: zero diagonal at " +
                               std::to_string(ii));
    double acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= r_tri(ii, j) * x[j];
    x[ii] = acc / d;
  }
  return x;
}

std::vector<double> solve_upper_transposed(const DenseMat& r_tri,
                                           const std::vector<double>& y) {
  std::size_t n = r_tri.rows();
  if (r_tri.cols() != n || y.size() != n)
    throw DimensionMismatch("solve_upper_transposed: shape mismatch");
  std::vector<double> x(y);
  for (std::size_t i = 0; i < n; ++i) {
    double d = r_tri(i, i);
    if (std::abs(d) < 1e-300)
      throw SingularTriangular("solve_upper_transposed: zero diagonal at " +
                               std::to_string(i));
    double acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc -= r_tri(j, i) * x[j];
    x[i] = acc / d;
  }
  return x;
}

namespace {

// One-sided Jacobi on a working copy with rows >= cols; returns (u, s, v).
SvdFactors jacobi_svd_tall(const DenseMat& a) {
  std::size_t m = a.rows(), n = a.cols();
  DenseMat w = a;
  DenseMat v = DenseMat::identity(n);

  double fro = w.frobenius_norm();
  // column dot products carry O(m eps) rounding noise; the threshold must sit
  // above it or the sweep never settles
  double off_tol = std::max(1e-15, 4.0 * std::numeric_limits<double>::epsilon() *
                                       static_cast<double>(m));
  std::size_t max_sweeps = 100 * std::max(m, n);

  std::vector<double> colsq(n, 0.0);
  auto col_dot = [&](std::size_t p, std::size_t q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += w(i, p) * w(i, q);
    return acc;
  };

  bool converged = (fro == 0.0);
  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    // rotations against a dominant column re-inject eps * max_colsq sized
    // junk into tiny columns; anything at that level is converged noise
    double max_colsq = 0.0;
    for (std::size_t j = 0; j < n; ++j) max_colsq = std::max(max_colsq, col_dot(j, j));
    double abs_floor = off_tol * max_colsq + 1e-300;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = col_dot(p, p);
        double aqq = col_dot(q, q);
        double apq = col_dot(p, q);
        if (std::abs(apq) <= off_tol * std::sqrt(app) * std::sqrt(aqq) + abs_floor)
          continue;
        converged = false;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) throw NoConvergence("svd_full: Jacobi sweep cap exceeded");

  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += w(i, j) * w(i, j);
    colsq[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return colsq[x] > colsq[y]; });

  SvdFactors out;
  out.s.resize(n);
  out.u = DenseMat(m, n);
  out.v = DenseMat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    out.s[j] = colsq[src];
    for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
    if (colsq[src] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, j) = w(i, src) / colsq[src];
    }
  }
  // Complete u columns for zero singular values so u stays orthonormal.
  SplitMix64 rng(0x0DDB1A5E5BAD5EEDull);
  for (std::size_t j = 0; j < n; ++j) {
    if (out.s[j] > 0.0) continue;
    std::vector<double> cand(m);
    for (int attempt = 0; attempt < 64; ++attempt) {
      if (attempt == 0 && j < m) {
        std::fill(cand.begin(), cand.end(), 0.0);
        cand[j] = 1.0;
      } else {
        for (std::size_t i = 0; i < m; ++i) cand[i] = rng.next_gaussian();
      }
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t c = 0; c < n; ++c) {
          if (c == j) continue;
          if (out.s[c] == 0.0 && c > j) continue;  // not filled yet
          double dot = 0.0;
          for (std::size_t i = 0; i < m; ++i) dot += out.u(i, c) * cand[i];
          for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * out.u(i, c);
        }
      double nrm = vec_norm(cand);
      if (nrm > 1e-6) {
        for (std::size_t i = 0; i < m; ++i) out.u(i, j) = cand[i] / nrm;
        break;
      }
    }
  }
  return out;
}

}  // namespace

SvdFactors svd_full(const DenseMat& a) {
  a.require_finite("svd_full");
  if (a.rows() == 0 || a.cols() == 0) throw DimensionMismatch("svd_full: empty matrix");
  if (a.rows() >= a.cols()) return jacobi_svd_tall(a);
  SvdFactors t = jacobi_svd_tall(a.transpose());
  SvdFactors out;
  out.u = std::move(t.v);
  out.v = std::move(t.u);
  out.s = std::move(t.s);
  return out;
}

SvdFactors truncated_svd(const ObservedEntries& a, std::size_t k, std::size_t sweeps,
                         std::uint64_t seed) {
  std::size_t m = a.rows(), n = a.cols();
  if (k == 0 || k > std::min(m, n))
    throw DimensionMismatch("truncated_svd: k out of range");
  if (sweeps == 0) throw DimensionMismatch("truncated_svd: sweeps must be >= 1");

  DenseMat x = orthonormal_completion(gaussian_matrix(n, k, seed), SplitMix64::split(seed, 1));
  DenseMat u(m, k);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    u = orthonormal_completion(a.multiply(x), SplitMix64::split(seed, 2 + 2 * sweep));
    x = orthonormal_completion(a.transpose_multiply(u),
                               SplitMix64::split(seed, 3 + 2 * sweep));
  }

  // Project and take the small SVD: A x = q r, r = ur s vr^T.
  DenseMat b = a.multiply(x);  // m x k
  DenseMat q = orthonormal_completion(b, SplitMix64::split(seed, 999));
  DenseMat r = q.transpose_multiply(b);  // k x k
  SvdFactors small = svd_full(r);

  SvdFactors out;
  out.u = q.multiply(small.u);
  out.v = x.multiply(small.v);
  out.s = small.s;

  DenseMat atu = a.transpose_multiply(out.u);  // n x k
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double d = atu(i, j) - out.v(i, j) * out.s[j];
      num += d * d;
    }
  for (double sv : out.s) den += sv * sv;
  out.subspace_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

double spectral_norm(const DenseMat& a, double tol) {
  a.require_finite("spectral_norm");
  std::size_t n = a.cols();
  if (n == 0 || a.rows() == 0) return 0.0;
  SplitMix64 rng(0x5917CE5EEDull);
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_gaussian();
  double nrm = vec_norm(v);
  if (nrm == 0.0) return 0.0;
  for (double& x : v) x /= nrm;

  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    std::vector<double> w = a.transpose_matvec(a.matvec(v));
    double next = vec_dot(v, w);
    double wn = vec_norm(w);
    if (wn == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (iter > 2 && std::abs(next - lambda) <= tol * std::max(next, 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

std::vector<double> svd_min_norm_solve(const DenseMat& a, const std::vector<double>& b,
                                       double rel_cutoff) {
  SvdFactors f = svd_full(a);
  double cutoff = f.s.empty() ? 0.0 : rel_cutoff * f.s[0];
  std::vector<double> utb(f.s.size(), 0.0);
  for (std::size_t j = 0; j < f.s.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) acc += f.u(i, j) * b[i];
    utb[j] = f.s[j] > cutoff && f.s[j] > 0.0 ? acc / f.s[j] : 0.0;
  }
  return f.v.matvec(utb);
}

}  // namespace fastmc
