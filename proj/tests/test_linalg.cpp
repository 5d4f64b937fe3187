#include <doctest.h>

#include <cmath>

#include "fastmc/linalg.hpp"
#include "fastmc/observed.hpp"
#include "test_support.hpp"

using fastmc::DenseMat;
using fastmc::ObservedEntries;

namespace {

ObservedEntries dense_as_sparse(const DenseMat& a) {
  std::vector<fastmc::Triplet> trips;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) trips.push_back({i, j, a(i, j)});
  return ObservedEntries::from_triplets(a.rows(), a.cols(), std::move(trips));
}

}  // namespace

TEST_CASE("qr of the identity is the identity") {
  auto f = fastmc::qr_householder(DenseMat::identity(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(std::abs(f.q(i, j)) - (i == j ? 1.0 : 0.0)) < 1e-14);
      CHECK(std::abs(std::abs(f.r_tri(i, j)) - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
}

TEST_CASE("qr of a single column is its norm") {
  DenseMat a = DenseMat::from_rows({{3.0}, {4.0}});
  auto f = fastmc::qr_householder(a);
  CHECK(std::abs(f.r_tri(0, 0)) == doctest::Approx(5.0));
  CHECK(std::abs(f.q(0, 0)) == doctest::Approx(0.6));
  CHECK(std::abs(f.q(1, 0)) == doctest::Approx(0.8));
}

TEST_CASE("qr reconstruction, orthonormality, exact lower zeros") {
  DenseMat a = testsup::randn(64, 8, 1001);
  auto f = fastmc::qr_householder(a);
  CHECK(testsup::ortho_defect(f.q) < 1e-10);
  DenseMat rec = f.q.multiply(f.r_tri);
  CHECK((rec - a).frobenius_norm() / a.frobenius_norm() < 1e-12);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(f.r_tri(i, j) == 0.0);
}

TEST_CASE("qr rank deficiency carries the offending column") {
  DenseMat a(6, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    a(i, 0) = static_cast<double>(i + 1);
    a(i, 1) = 2.0 * static_cast<double>(i + 1);  // parallel column
    a(i, 2) = std::cos(static_cast<double>(i));
  }
  CHECK_THROWS_AS(fastmc::qr_householder(a), fastmc::RankDeficient);
  try {
    fastmc::qr_householder(a);
  } catch (const fastmc::RankDeficient& e) {
    CHECK(e.index == 1);
  }
  DenseMat z(4, 2);  // zero columns
  CHECK_THROWS_AS(fastmc::orthonormalize(z), fastmc::RankDeficient);
}

TEST_CASE("upper triangular solves") {
  DenseMat i2 = DenseMat::identity(2);
  auto x = fastmc::solve_upper_triangular(i2, {1.0, 2.0});
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 2.0);

  DenseMat r = DenseMat::from_rows({{2, 1}, {0, 4}});
  auto y = fastmc::solve_upper_triangular(r, {4.0, 8.0});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(2.0));

  // transposed solve agrees with solving R^T x = y by hand
  auto z = fastmc::solve_upper_transposed(r, {2.0, 9.0});
  CHECK(z[0] == doctest::Approx(1.0));   // 2 x0 = 2
  CHECK(z[1] == doctest::Approx(2.0));   // 1 x0 + 4 x1 = 9

  DenseMat sing = DenseMat::from_rows({{1, 1}, {0, 0}});
  CHECK_THROWS_AS(fastmc::solve_upper_triangular(sing, {1.0, 1.0}),
                  fastmc::SingularTriangular);
}

TEST_CASE("random triangular solve hits 1e-12 relative accuracy") {
  DenseMat r(6, 6);
  fastmc::SplitMix64 rng(5);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i; j < 6; ++j) r(i, j) = rng.next_gaussian();
    r(i, i) += (r(i, i) >= 0 ? 2.0 : -2.0);
  }
  std::vector<double> xtrue(6);
  for (double& v : xtrue) v = rng.next_gaussian();
  std::vector<double> y = r.matvec(xtrue);
  auto x = fastmc::solve_upper_triangular(r, y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    num += (x[i] - xtrue[i]) * (x[i] - xtrue[i]);
    den += xtrue[i] * xtrue[i];
  }
  CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("svd of a diagonal matrix") {
  auto f = fastmc::svd_full(DenseMat::from_rows({{3, 0}, {0, 1}}));
  CHECK(f.s[0] == doctest::Approx(3.0));
  CHECK(f.s[1] == doctest::Approx(1.0));
}

TEST_CASE("svd of the zero matrix keeps orthonormal factors") {
  auto f = fastmc::svd_full(DenseMat(5, 3));
  for (double s : f.s) CHECK(s == 0.0);
  CHECK(testsup::ortho_defect(f.u) < 1e-10);
  CHECK(testsup::ortho_defect(f.v) < 1e-10);
}

TEST_CASE("svd singular values match the Gram eigenvalue oracle") {
  DenseMat a = testsup::randn(10, 4, 77);
  auto f = fastmc::svd_full(a);
  auto eig = testsup::oracle_gram_eigenvalues(a);
  REQUIRE(eig.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(f.s[i] * f.s[i] == doctest::Approx(eig[i]).epsilon(1e-8));
}

TEST_CASE("svd reconstruction, energy, orthonormality, wide input") {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{12, 5}, {5, 12}}) {
    DenseMat a = testsup::randn(m, n, 31 + m);
    auto f = fastmc::svd_full(a);
    CHECK(testsup::ortho_defect(f.u) < 1e-10);
    CHECK(testsup::ortho_defect(f.v) < 1e-10);
    for (std::size_t i = 0; i + 1 < f.s.size(); ++i) CHECK(f.s[i] >= f.s[i + 1]);
    double energy = 0.0;
    for (double s : f.s) energy += s * s;
    double fro2 = a.frobenius_norm() * a.frobenius_norm();
    CHECK(energy == doctest::Approx(fro2).epsilon(1e-10));
    // reconstruct u diag(s) v^T
    DenseMat us = f.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
      for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= f.s[j];
    DenseMat rec = us.multiply(f.v.transpose());
    CHECK((rec - a).frobenius_norm() / a.frobenius_norm() < 1e-8);
  }
}

TEST_CASE("truncated svd: diagonal and rank-1 cases") {
  ObservedEntries d = dense_as_sparse(DenseMat::from_rows({{5, 0, 0}, {0, 3, 0}, {0, 0, 1}}));
  auto f = fastmc::truncated_svd(d, 2, 30);
  CHECK(f.s[0] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(f.s[1] == doctest::Approx(3.0).epsilon(1e-9));

  DenseMat e11(4, 4);
  e11(0, 0) = 1.0;
  auto g = fastmc::truncated_svd(dense_as_sparse(e11), 1, 30);
  CHECK(g.s[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(g.u(0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("truncated svd tracks the dense oracle on a masked low-rank matrix") {
  // random rank-3 matrix, 30% mask, scaled by 1/p
  std::size_t m = 200, n = 300;
  DenseMat left = testsup::randn(m, 3, 11);
  DenseMat right = testsup::randn(n, 3, 12);
  DenseMat full = left.multiply(right.transpose());
  fastmc::SplitMix64 rng(13);
  std::vector<fastmc::Triplet> trips;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (rng.next_double() < 0.3) trips.push_back({i, j, full(i, j) / 0.3});
  ObservedEntries masked = ObservedEntries::from_triplets(m, n, std::move(trips));

  auto f = fastmc::truncated_svd(masked, 3, 50);
  auto dense = fastmc::svd_full(masked.to_dense());
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(f.s[i] == doctest::Approx(dense.s[i]).epsilon(0.05));
}

TEST_CASE("truncated svd matches full svd on a dense-as-sparse matrix") {
  DenseMat a = testsup::randn(30, 6, 14);
  auto f = fastmc::truncated_svd(dense_as_sparse(a), 6, 300);
  auto g = fastmc::svd_full(a);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(f.s[i] == doctest::Approx(g.s[i]).epsilon(1e-6));
  CHECK(f.subspace_residual < 1e-5);
}

TEST_CASE("spectral norm basics and oracle agreement") {
  CHECK(fastmc::spectral_norm(DenseMat::identity(4)) == doctest::Approx(1.0));
  CHECK(fastmc::spectral_norm(DenseMat::from_rows({{2, 0}, {0, -7}})) ==
        doctest::Approx(7.0));

  DenseMat a = testsup::randn(20, 20, 15);
  auto f = fastmc::svd_full(a);
  CHECK(fastmc::spectral_norm(a, 1e-8) == doctest::Approx(f.s[0]).epsilon(1e-6));
  // spectral <= frobenius, equality for rank one
  CHECK(fastmc::spectral_norm(a) <= a.frobenius_norm() * (1 + 1e-12));
  DenseMat rank1 = testsup::randn(9, 1, 16).multiply(testsup::randn(1, 7, 17));
  CHECK(fastmc::spectral_norm(rank1) ==
        doctest::Approx(rank1.frobenius_norm()).epsilon(1e-8));
}

TEST_CASE("orthonormal completion repairs rank deficiency") {
  DenseMat a(8, 3);
  for (std::size_t i = 0; i < 8; ++i) a(i, 0) = 1.0;  // rank 1
  bool completed = false;
  DenseMat q = fastmc::orthonormal_completion(a, 3, &completed);
  CHECK(completed);
  CHECK(testsup::ortho_defect(q) < 1e-10);
  // first column spans col(a)
  double dot = 0.0;
  for (std::size_t i = 0; i < 8; ++i) dot += q(i, 0) / std::sqrt(8.0);
  CHECK(std::abs(std::abs(dot) - 1.0) < 1e-12);
}
