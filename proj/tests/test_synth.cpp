#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fastmc/linalg.hpp"
#include "fastmc/metrics.hpp"
#include "fastmc/synth.hpp"
#include "test_support.hpp"

using fastmc::DenseMat;
using fastmc::GroundTruth;

TEST_CASE("generated problems meet their declared contract") {
  GroundTruth gt = fastmc::gen_incoherent(200, 300, 5, 2.0, 3.0, 1);
  CHECK(testsup::ortho_defect(gt.u_star) < 1e-10);
  CHECK(testsup::ortho_defect(gt.v_star) < 1e-10);
  CHECK(gt.sigma_star.front() == doctest::Approx(2.0));
  CHECK(gt.sigma_star.back() == doctest::Approx(1.0));
  for (std::size_t i = 0; i + 1 < 5; ++i)
    CHECK(gt.sigma_star[i] >= gt.sigma_star[i + 1]);
  CHECK(gt.mu_actual <= 3.0);
  CHECK(gt.mu_actual ==
        doctest::Approx(std::max(fastmc::incoherence(gt.u_star),
                                 fastmc::incoherence(gt.v_star))));
  CHECK(gt.kappa == doctest::Approx(2.0));
}

TEST_CASE("kappa = 1 gives a flat spectrum; k = 1 degenerates cleanly") {
  GroundTruth flat = fastmc::gen_incoherent(30, 40, 4, 1.0, 3.0, 2);
  for (double s : flat.sigma_star) CHECK(s == doctest::Approx(1.0));

  GroundTruth rank1 = fastmc::gen_incoherent(30, 40, 1, 1.0, 5.0, 3);
  CHECK(rank1.sigma_star.size() == 1);
  CHECK(rank1.sigma_star[0] == 1.0);
}

TEST_CASE("rejection sampling succeeds across seeds at desk scale") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GroundTruth gt = fastmc::gen_incoherent(200, 300, 5, 2.0, 3.0, seed);
    CHECK(gt.mu_actual <= 3.0);
  }
}

TEST_CASE("unreachable incoherence targets throw after the rejection cap") {
  CHECK_THROWS_AS(fastmc::gen_incoherent(64, 64, 1, 1.0, 1.0 + 1e-9, 4),
                  fastmc::IncoherenceUnreachable);
}

TEST_CASE("entry oracle matches the dense materialization") {
  GroundTruth gt = fastmc::gen_incoherent(10, 10, 3, 2.0, 3.5, 5);
  DenseMat us = gt.u_star;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 3; ++j) us(i, j) *= gt.sigma_star[j];
  DenseMat dense = us.multiply(gt.v_star.transpose());
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      CHECK(fastmc::entry_oracle(gt, i, j) == doctest::Approx(dense(i, j)).epsilon(1e-12));
}

TEST_CASE("materialized matrix has exact rank k and the declared energy") {
  GroundTruth gt = fastmc::gen_incoherent(24, 18, 4, 3.0, 3.5, 6);
  DenseMat m(24, 18);
  for (std::size_t i = 0; i < 24; ++i)
    for (std::size_t j = 0; j < 18; ++j) m(i, j) = fastmc::entry_oracle(gt, i, j);
  auto f = fastmc::svd_full(m);
  CHECK(f.s[4] <= 1e-10 * f.s[0]);
  double fro2 = m.frobenius_norm() * m.frobenius_norm();
  double energy = 0.0;
  for (double s : gt.sigma_star) energy += s * s;
  CHECK(fro2 == doctest::Approx(energy).epsilon(1e-10));
  CHECK(fastmc::ground_truth_frobenius(gt) == doctest::Approx(std::sqrt(energy)));
}

TEST_CASE("ground truth files round-trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "fastmc_synth_test";
  fs::remove_all(dir);
  GroundTruth gt = fastmc::gen_incoherent(12, 9, 2, 2.0, 3.0, 7);
  fastmc::write_ground_truth(dir.string(), gt, 7);
  GroundTruth back = fastmc::read_ground_truth(dir.string());
  CHECK(testsup::max_abs_diff(back.u_star, gt.u_star) == 0.0);
  CHECK(testsup::max_abs_diff(back.v_star, gt.v_star) == 0.0);
  CHECK(back.sigma_star == gt.sigma_star);
  CHECK(back.kappa == doctest::Approx(gt.kappa));
  fs::remove_all(dir);
}
