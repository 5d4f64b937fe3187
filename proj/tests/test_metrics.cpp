#include <doctest.h>

#include <cmath>

#include "fastmc/linalg.hpp"
#include "fastmc/metrics.hpp"
#include "test_support.hpp"

using fastmc::DenseMat;

namespace {

// Explicit-complement oracle: build U_perp by completing the basis, then take
// ||U_perp^T W|| directly.
double dist_via_complement(const DenseMat& u_in, const DenseMat& w_in) {
  std::size_t n = u_in.rows(), k = u_in.cols();
  DenseMat u = testsup::cgs2_basis(u_in);
  DenseMat w = testsup::cgs2_basis(w_in);
  DenseMat ext(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) ext(i, j) = u(i, j);
  fastmc::SplitMix64 rng(4242);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = k; j < n; ++j) ext(i, j) = rng.next_gaussian();
  DenseMat full = testsup::cgs2_basis(ext);
  DenseMat uperp(n, n - k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = k; j < n; ++j) uperp(i, j - k) = full(i, j);
  auto f = fastmc::svd_full(uperp.transpose_multiply(w));
  return f.s.empty() ? 0.0 : f.s.front();
}

DenseMat span_e(std::size_t n, std::size_t axis) {
  DenseMat out(n, 1);
  out(axis, 0) = 1.0;
  return out;
}

}  // namespace

TEST_CASE("principal_dist basics and the complement oracle") {
  DenseMat u = testsup::random_orthonormal(12, 3, 201);
  CHECK(fastmc::principal_dist(u, u) < 1e-12);

  CHECK(fastmc::principal_dist(span_e(3, 0), span_e(3, 1)) == doctest::Approx(1.0));

  DenseMat a = testsup::randn(50, 3, 202);
  DenseMat b = testsup::randn(50, 3, 203);
  double d = fastmc::principal_dist(a, b);
  CHECK(d == doctest::Approx(dist_via_complement(a, b)).epsilon(1e-10));
  CHECK(d == doctest::Approx(fastmc::principal_dist(b, a)).epsilon(1e-10));

  DenseMat rank_def(50, 3);
  CHECK_THROWS_AS(fastmc::principal_dist(rank_def, b), fastmc::RankDeficient);
}

TEST_CASE("principal_dist is basis independent") {
  DenseMat a = testsup::randn(30, 4, 204);
  DenseMat b = testsup::randn(30, 4, 205);
  DenseMat g = testsup::randn(4, 4, 206);
  for (std::size_t i = 0; i < 4; ++i) g(i, i) += 3.0;  // well away from singular
  CHECK(fastmc::principal_dist(a, b) ==
        doctest::Approx(fastmc::principal_dist(a, b.multiply(g))).epsilon(1e-10));
}

TEST_CASE("subspace_geometry on aligned and orthogonal spans") {
  DenseMat u = testsup::random_orthonormal(10, 2, 207);
  auto same = fastmc::subspace_geometry(u, u);
  CHECK(same.sin_theta < 1e-10);
  CHECK(same.cos_theta == doctest::Approx(1.0));
  CHECK(same.tan_theta < 1e-8);
  CHECK(same.dist_c_ub < 1e-10);

  auto orth = fastmc::subspace_geometry(span_e(4, 0), span_e(4, 2));
  CHECK(orth.sin_theta == doctest::Approx(1.0));
  CHECK(orth.cos_theta == doctest::Approx(0.0));
  CHECK(std::isinf(orth.tan_theta));

  DenseMat not_ortho(10, 2, 0.5);
  CHECK_THROWS_AS(fastmc::subspace_geometry(not_ortho, u), fastmc::NotOrthonormal);
}

TEST_CASE("subspace_geometry invariants on random pairs") {
  int checked = 0;
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{8, 2}, {40, 4}, {100, 7}}) {
    for (int trial = 0; trial < 30; ++trial) {
      DenseMat v = testsup::random_orthonormal(n, k, 300 + trial * 7 + n);
      DenseMat u = testsup::random_orthonormal(n, k, 400 + trial * 11 + n);
      auto g = fastmc::subspace_geometry(v, u);
      CHECK(g.sin_theta * g.sin_theta + g.cos_theta * g.cos_theta ==
            doctest::Approx(1.0).epsilon(1e-10));
      if (g.cos_theta > 1e-8)
        CHECK(g.tan_theta ==
              doctest::Approx(g.sin_theta / g.cos_theta).epsilon(1e-8));
      CHECK(std::abs(g.dist - g.sin_theta) < 1e-10);
      CHECK(g.sin_theta <= g.dist_c_ub + 1e-10);
      if (std::isfinite(g.tan_theta))
        CHECK(g.dist_c_ub <= 2.0 * g.tan_theta + 1e-8);
      ++checked;
    }
  }
  CHECK(checked == 90);
}

TEST_CASE("incoherence of canonical bases") {
  // first k columns of the identity: maximal concentration
  std::size_t m = 12, k = 3;
  DenseMat e(m, k);
  for (std::size_t j = 0; j < k; ++j) e(j, j) = 1.0;
  CHECK(fastmc::incoherence(e) == doctest::Approx(std::sqrt(12.0 / 3.0)));

  // normalized Hadamard columns: perfectly flat
  std::size_t h = 8;
  DenseMat had(h, 2);
  for (std::size_t i = 0; i < h; ++i) {
    had(i, 0) = ((__builtin_popcountll(i & 1) & 1) ? -1.0 : 1.0) / std::sqrt(8.0);
    had(i, 1) = ((__builtin_popcountll(i & 2) & 1) ? -1.0 : 1.0) / std::sqrt(8.0);
  }
  CHECK(fastmc::incoherence(had) == doctest::Approx(1.0));

  // random orthonormal: matches a direct row-norm scan
  DenseMat q = testsup::random_orthonormal(64, 4, 208);
  double max_row = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j) acc += q(i, j) * q(i, j);
    max_row = std::max(max_row, std::sqrt(acc));
  }
  CHECK(fastmc::incoherence(q) ==
        doctest::Approx(max_row * std::sqrt(64.0 / 4.0)).epsilon(1e-10));
  CHECK(fastmc::incoherence(q) >= 1.0 - 1e-10);
}

TEST_CASE("leverage scores: projector trace and the svd row-norm identity") {
  DenseMat q = testsup::random_orthonormal(20, 3, 209);
  auto lq = fastmc::leverage_scores(q);
  for (std::size_t i = 0; i < 20; ++i) {
    double rn = 0.0;
    for (std::size_t j = 0; j < 3; ++j) rn += q(i, j) * q(i, j);
    CHECK(lq[i] == doctest::Approx(rn).epsilon(1e-10));
  }

  DenseMat x = testsup::randn(30, 3, 210);
  auto lx = fastmc::leverage_scores(x);
  double sum = 0.0;
  for (double l : lx) {
    CHECK(l >= -1e-12);
    CHECK(l <= 1.0 + 1e-12);
    sum += l;
  }
  CHECK(sum == doctest::Approx(3.0).epsilon(1e-8));

  auto f = fastmc::svd_full(x);
  for (std::size_t i = 0; i < 30; ++i) {
    double rn = 0.0;
    for (std::size_t j = 0; j < 3; ++j) rn += f.u(i, j) * f.u(i, j);
    CHECK(lx[i] == doctest::Approx(rn).epsilon(1e-10));
  }
}

TEST_CASE("leverage scores are invariant under right multiplication") {
  DenseMat x = testsup::randn(25, 4, 211);
  DenseMat g = testsup::randn(4, 4, 212);
  for (std::size_t i = 0; i < 4; ++i) g(i, i) += 3.0;
  auto a = fastmc::leverage_scores(x);
  auto b = fastmc::leverage_scores(x.multiply(g));
  for (std::size_t i = 0; i < 25; ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8));
}

TEST_CASE("condition number") {
  CHECK(fastmc::condition_number(testsup::random_orthonormal(15, 4, 213)) ==
        doctest::Approx(1.0));
  CHECK(fastmc::condition_number(DenseMat::from_rows({{4, 0}, {0, 1}})) ==
        doctest::Approx(4.0));
  DenseMat x = testsup::randn(12, 3, 214);
  auto f = fastmc::svd_full(x);
  CHECK(fastmc::condition_number(x) ==
        doctest::Approx(f.s.front() / f.s.back()).epsilon(1e-10));
}

TEST_CASE("leverage-score perturbation bound") {
  DenseMat a = testsup::randn(20, 3, 215);
  auto same = fastmc::check_incoherence_perturbation(a, a);
  for (double v : same.lhs) CHECK(v == 0.0);

  DenseMat e = testsup::randn(20, 3, 216);
  double escale = 1e-8 / fastmc::spectral_norm(e);
  DenseMat b = a + escale * e;
  auto small = fastmc::check_incoherence_perturbation(a, b);
  for (double v : small.lhs) CHECK(v <= small.rhs);
  CHECK(small.rhs < 1e-4);  // large margin at this perturbation size

  // rotation invariance: lhs identically zero, rhs positive. The rotation
  // must stay near the identity to keep the lemma hypothesis satisfied.
  double th = 0.01;
  DenseMat rot = DenseMat::from_rows(
      {{std::cos(th), -std::sin(th), 0.0}, {std::sin(th), std::cos(th), 0.0}, {0.0, 0.0, 1.0}});
  auto rotated = fastmc::check_incoherence_perturbation(a, a.multiply(rot));
  for (double v : rotated.lhs) CHECK(v < 1e-10);
  CHECK(rotated.rhs > 0.0);

  // violated hypothesis
  CHECK_THROWS_AS(fastmc::check_incoherence_perturbation(a, 5.0 * a),
                  fastmc::PreconditionViolated);
}

TEST_CASE("distance-by-spectral bound") {
  DenseMat x = testsup::randn(18, 3, 218);
  auto same = fastmc::check_dist_by_spectral(x, x);
  CHECK(same.first <= same.second + 1e-12);

  DenseMat g = DenseMat::identity(3) + 0.05 * testsup::randn(3, 3, 219);
  auto span = fastmc::check_dist_by_spectral(x, x.multiply(g));
  CHECK(span.first < 1e-8);  // same span, dist 0

  DenseMat y = x + 0.01 * testsup::randn(18, 3, 220);
  auto pert = fastmc::check_dist_by_spectral(x, y);
  CHECK(pert.first <= pert.second);

  DenseMat far = testsup::randn(18, 3, 221);
  CHECK_THROWS_AS(fastmc::check_dist_by_spectral(x, 100.0 * far),
                  fastmc::PreconditionViolated);
}

TEST_CASE("pseudoinverse perturbation bound") {
  DenseMat a = DenseMat::from_rows({{2, 0}, {0, 5}});
  DenseMat b = DenseMat::from_rows({{2.5, 0}, {0, 4.0}});
  auto [lhs, rhs] = fastmc::check_pinv_perturbation(a, b);
  // pinv gap for diagonals: max(|1/2 - 1/2.5|, |1/5 - 1/4|) = 0.1
  CHECK(lhs == doctest::Approx(0.1).epsilon(1e-10));
  // 2 max(1/2, 1/2.5)^2 * max(0.5, 1.0) = 0.5
  CHECK(rhs == doctest::Approx(2.0 * 0.25 * 1.0).epsilon(1e-10));
  CHECK(lhs <= rhs);

  auto same = fastmc::check_pinv_perturbation(a, a);
  CHECK(same.first == 0.0);

  DenseMat x = testsup::randn(14, 3, 222);
  DenseMat y = x + 0.05 * testsup::randn(14, 3, 223);
  auto pair = fastmc::check_pinv_perturbation(x, y);
  CHECK(pair.first <= pair.second);
}

TEST_CASE("fourth-moment incoherence sums") {
  // identity embedding: the aligned direction makes the bound tight
  std::size_t m = 12, k = 3;
  DenseMat e(m, k);
  for (std::size_t j = 0; j < k; ++j) e(j, j) = 1.0;
  double mu_e = fastmc::incoherence(e);
  auto tight = fastmc::check_fourth_moment(e, e, mu_e, mu_e, 50, 224);
  CHECK(tight.first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tight.second == doctest::Approx(1.0).epsilon(1e-12));

  // random orthonormal bases stay at or below the bound
  DenseMat ut = testsup::random_orthonormal(40, 4, 225);
  DenseMat us = testsup::random_orthonormal(40, 4, 226);
  auto r = fastmc::check_fourth_moment(ut, us, fastmc::incoherence(ut),
                                       fastmc::incoherence(us), 200, 227);
  CHECK(r.first <= 1.0 + 1e-10);
  CHECK(r.second <= 1.0 + 1e-10);

  // understated bounds are rejected
  CHECK_THROWS_AS(fastmc::check_fourth_moment(ut, us, 1.0 - 1e-6, 1.0 - 1e-6, 5, 228),
                  fastmc::PreconditionViolated);
}
