#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ldrm/ratefn.hpp"

using namespace ldrm;

namespace {

double psi_goe(double x, double sigma = 1.0) {
  double u = x / sigma;
  double r = std::sqrt(u * u - 4);
  return u * r / 4 + std::log(2 / (u + r));
}

double psi_wishart1(double x) {
  auto f = [](double t) { return 0.5 * std::sqrt(t * t - 4 * t) / t; };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 4.0, x, 15, 1e-13);
}

}  // namespace

TEST_CASE("one-matrix rates match closed forms") {
  for (double x : {2.05, 2.5, 3.0, 4.5}) CHECK(psi_one_matrix(goe(1.0), x) == doctest::Approx(psi_goe(x)).epsilon(1e-9));
  for (double x : {4.1, 5.0, 7.0}) CHECK(psi_one_matrix(wishart(1.0), x) == doctest::Approx(psi_wishart1(x)).epsilon(1e-9));
  CHECK(psi_one_matrix(goe(1.0), 1.5) == kInf);
  CHECK(psi_one_matrix(goe(1.0, 3.0), 3.5) == kInf);
  for (double x : {2.2, 3.0}) CHECK(phi_one_rect(ginibre(1.0), x) == doctest::Approx(2 * psi_goe(x)).epsilon(1e-9));
  CHECK(phi_one_rect_conv(ginibre(1.0), 3.0) == doctest::Approx(2 * psi_goe(3.0)).epsilon(1e-7));
}

TEST_CASE("sum of two GOE matrices is a GOE matrix") {
  auto c = rate_curve(add_conv(goe(1.0), goe(0.9)));
  double s = std::sqrt(1.81);
  CHECK(c.c_plus == doctest::Approx(2 * s).epsilon(1e-10));
  for (double x : {2.75, 3.0, 3.6, 5.0}) CHECK(c(x) == doctest::Approx(psi_goe(x, s)).epsilon(1e-7));
}

TEST_CASE("product with the identity reduces to Wishart") {
  auto c = rate_curve(mul_conv(wishart(1.0), fixed_diagonal(SpectralDensity::dirac(1.0))));
  for (double x : {4.2, 5.0, 6.5}) CHECK(c(x) == doctest::Approx(psi_wishart1(x)).epsilon(1e-7));
}

TEST_CASE("rectangular sum with a null matrix reduces to Ginibre") {
  auto c = rate_curve(rect_conv(ginibre(1.0), fixed_rect(SpectralDensity::dirac(0.0), 1.0), 1.0));
  for (double x : {2.3, 3.0}) CHECK(c(x) == doctest::Approx(2 * psi_goe(x)).epsilon(1e-6));
}

TEST_CASE("semicircle sum with walls at the edges") {
  auto conv = add_conv(fixed_diagonal(SpectralDensity::semicircle(1.0)), fixed_diagonal(SpectralDensity::semicircle(0.9)));
  auto c = rate_curve(conv);
  CHECK(c.x_c1 == doctest::Approx(2.81).epsilon(1e-9));
  CHECK(c.x_c2 == doctest::Approx(2.9).epsilon(1e-9));
  CHECK(c.hard_bound == doctest::Approx(3.8).epsilon(1e-12));
  CHECK(c.regime(2.75) == 1);
  CHECK(c.regime(2.85) == 2);
  CHECK(c.regime(3.3) == 3);
  CHECK(c(3.9) == kInf);
  for (double xc : {c.x_c1, c.x_c2}) {
    double h = 1e-6;
    CHECK(c(xc - h) == doctest::Approx(c(xc + h)).epsilon(1e-6));
    double left = (c(xc) - c(xc - 1e-4)) / 1e-4, right = (c(xc + 1e-4) - c(xc)) / 1e-4;
    CHECK(left == doctest::Approx(right).epsilon(1e-2));
  }
  double prev = 0.0;
  for (double x = 2.70; x < 3.79; x += 0.01) {
    double v = c(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("effective potential vanishes at the edge and grows outside") {
  auto conv = add_conv(goe(1.0), goe(0.9));
  auto c = rate_curve(conv);
  CHECK(std::abs(effective_potential(c, conv, c.c_plus)) < 1e-8);
  CHECK(effective_potential(c, conv, c.c_plus + 1.0) > 0.0);
  double s2 = 1.81, x = 1.0;
  // Inside the bulk V(x) - V(c+) = (x^2 - c+^2) / (2 s^2) for a Gaussian law.
  CHECK(effective_potential(c, conv, x) == doctest::Approx((x * x - 4 * s2) / (2 * s2)).epsilon(1e-5));
}

TEST_CASE("Tracy-Widom three-halves scaling") {
  auto c = rate_curve(add_conv(goe(1.0), fixed_diagonal(SpectralDensity::dirac(0.0))));
  auto fit = tw_scaling_check(c, 1.0);
  CHECK(fit.exponent == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(fit.coefficient == doctest::Approx(fit.expected_coefficient).epsilon(1e-2));
}
