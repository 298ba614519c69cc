#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldrm/transforms.hpp"

using namespace ldrm;

TEST_CASE("GOE Stieltjes branches and inverse") {
  auto e = goe(1.0);
  for (double x : {2.2, 3.0, 5.0}) {
    double r = std::sqrt(x * x - 4);
    CHECK(stieltjes(e.density, x) == doctest::Approx((x - r) / 2).epsilon(1e-10));
    CHECK(stieltjes_second(e, x) == doctest::Approx((x + r) / 2).epsilon(1e-10));
  }
  for (double y : {0.2, 0.7, 1.5, 3.0}) CHECK(stieltjes_inverse(e, y) == doctest::Approx(y + 1 / y).epsilon(1e-10));
  for (double y : {0.1, 0.9, 4.0}) CHECK(r_transform(e, y) == doctest::Approx(y).epsilon(1e-10));
}

TEST_CASE("numeric and closed-form paths agree") {
  auto d = SpectralDensity::semicircle(1.3);
  auto n = d.as_numeric();
  for (double x : {2.7, 3.0, 4.5}) CHECK(stieltjes(n, x) == doctest::Approx(stieltjes(d, x)).epsilon(1e-8));
  auto m = SpectralDensity::marchenko_pastur(0.5);
  auto mn = m.as_numeric();
  for (double x : {3.0, 4.0, 6.0}) CHECK(stieltjes(mn, x) == doctest::Approx(stieltjes(m, x)).epsilon(1e-8));
}

TEST_CASE("Marchenko-Pastur q=1 transforms") {
  auto e = wishart(1.0);
  for (double z : {4.5, 6.0, 9.0}) {
    double g = (z - std::sqrt(z * z - 4 * z)) / (2 * z);
    CHECK(stieltjes(e.density, z) == doctest::Approx(g).epsilon(1e-10));
    CHECK(t_transform(e.density, z) == doctest::Approx(z * g - 1).epsilon(1e-10));
  }
  for (double y : {0.2, 0.8}) {
    double z = t_inverse(e, y);
    CHECK(t_transform(e.density, z) == doctest::Approx(y).epsilon(1e-9));
  }
}

TEST_CASE("walls select the second branch value") {
  auto e = goe(1.0, 3.0);
  CHECK(gbar_at_wall(e) == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-10));
  auto f = fixed_diagonal(SpectralDensity::semicircle(1.0));
  CHECK(gbar_at_wall(f) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rectangular helper U is inverted by u_inv") {
  for (double q : {0.25, 1.0})
    for (double y : {1.0, 1.5, 4.0}) CHECK(u_inv(q, u_func(q, y)) == doctest::Approx(y).epsilon(1e-10));
}

TEST_CASE("D-transform of the quarter circle inverts") {
  auto r = ginibre(1.0);
  for (double y : {0.1, 0.3}) {
    double x = d_inverse(r, y);
    CHECK(d_transform(r.lsvd, 1.0, x) == doctest::Approx(y).epsilon(1e-9));
  }
}
