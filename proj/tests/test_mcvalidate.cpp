#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldrm/errors.hpp"
#include "ldrm/mcvalidate.hpp"
#include "ldrm/rankone.hpp"

using namespace ldrm;

TEST_CASE("seeds are deterministic and distinct") {
  CHECK(derive_seed(7, 1) == derive_seed(7, 1));
  CHECK(derive_seed(7, 1) != derive_seed(7, 2));
  CHECK(derive_seed(7, 1) != derive_seed(8, 1));
}

TEST_CASE("eigensolver agrees with characteristic polynomial roots") {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 1.0, 1.0, -1.0;
  auto ev = symmetric_eigenvalues(m);
  double disc = std::sqrt(9.0 / 4.0 + 1.0);
  CHECK(ev[0] == doctest::Approx(0.5 - disc).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.5 + disc).epsilon(1e-12));
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) t(i, i) = 2.0;
  for (int i = 0; i < 3; ++i) t(i, i + 1) = t(i + 1, i) = -1.0;
  auto e4 = symmetric_eigenvalues(t);
  for (int k = 1; k <= 4; ++k) CHECK(e4[k - 1] == doctest::Approx(2 - 2 * std::cos(k * M_PI / 5)).epsilon(1e-10));
}

TEST_CASE("Haar matrices are orthogonal") {
  auto q = haar_orthogonal(20, 5);
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(20, 20)).norm() < 1e-10);
}

TEST_CASE("GOE scaling") {
  auto g = sample_goe(400, 1.0, 3);
  CHECK((g - g.transpose()).norm() == 0.0);
  double off = 0;
  for (int i = 0; i < 400; ++i)
    for (int j = 0; j < i; ++j) off += g(i, j) * g(i, j);
  CHECK(off / (400.0 * 399 / 2) == doctest::Approx(1.0 / 400).epsilon(0.05));
}

TEST_CASE("top eigenvalue reports are reproducible") {
  McConfig cfg;
  cfg.model = McModel::single;
  cfg.a.kind = McOperand::Kind::goe;
  cfg.n = 128;
  cfg.samples = 20;
  cfg.seed = 9;
  auto r1 = sample_model_top(cfg);
  auto r2 = sample_model_top(cfg);
  CHECK(r1.to_json() == r2.to_json());
  CHECK(r1.mean == doctest::Approx(2.0).epsilon(0.05));
  cfg.seed = 10;
  CHECK(sample_model_top(cfg).to_json() != r1.to_json());
}

TEST_CASE("pooled GOE spectrum follows the semicircle") {
  McConfig cfg;
  cfg.a.kind = McOperand::Kind::goe;
  cfg.n = 256;
  cfg.samples = 10;
  auto r = histogram_vs_density(cfg, SpectralDensity::semicircle(1.0));
  CHECK(r.sup_cdf >= 0.0);
  CHECK(r.sup_cdf <= 0.03);
}

TEST_CASE("far tails are reported as insufficient") {
  McConfig cfg;
  cfg.a.kind = McOperand::Kind::goe;
  cfg.n = 128;
  cfg.samples = 20;
  CHECK_THROWS_AS(empirical_rate(cfg, {3.0}), InsufficientTail);
  auto r = empirical_rate(cfg, {1.5, 3.0});
  REQUIRE(r.rates.size() == 2);
  CHECK(r.rates[0].rate == doctest::Approx(0.0).scale(1.0));
  CHECK(r.rates[1].flagged);
}

TEST_CASE("rk1rk1 empirical rate is close to the exact one") {
  McConfig cfg;
  cfg.model = McModel::rk1rk1;
  cfg.n = 64;
  cfg.samples = 100000;
  cfg.seed = 4;
  auto r = empirical_rate(cfg, {2.2});
  double exact = -std::log(rk1rk1_tail(Rk1PlusRk1{}, 64, 2.2)) / 64;
  CHECK(r.rates[0].rate == doctest::Approx(exact).epsilon(0.03));
}
