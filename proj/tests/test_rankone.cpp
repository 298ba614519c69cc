#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ldrm/rankone.hpp"

using namespace ldrm;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

double g_sc(double t) { return (t - std::sqrt(t * t - 4)) / 2; }
double gbar_sc(double t) { return (t + std::sqrt(t * t - 4)) / 2; }

// Spiked GOE: the rate derivative is (gbar - g)/2 while g exceeds gamma, then (gbar - gamma)/2.
double spiked_goe_rate(double gamma, double x) {
  if (gamma > 1) {
    double lam = gamma + 1 / gamma;
    return quad([&](double t) { return 0.5 * (gbar_sc(t) - gamma); }, lam, x);
  }
  double xc = gamma + 1 / gamma;
  if (x <= xc) return quad([](double t) { return 0.5 * (gbar_sc(t) - g_sc(t)); }, 2.0, x);
  return quad([](double t) { return 0.5 * (gbar_sc(t) - g_sc(t)); }, 2.0, xc) +
         quad([&](double t) { return 0.5 * (gbar_sc(t) - gamma); }, xc, x);
}

}  // namespace

TEST_CASE("BBP transition of the spiked GOE") {
  CHECK(bbp_top(make_spike(goe(1.0), 0.5, ConvOp::add)) == doctest::Approx(2.0));
  CHECK(bbp_top(make_spike(goe(1.0), 2.0, ConvOp::add)) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(make_spike(goe(1.0), 2.0, ConvOp::add).threshold == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spiked GOE rate above threshold") {
  auto c = rankone_curve(make_spike(goe(1.0), 2.0, ConvOp::add));
  CHECK(c.typical == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(std::abs(c(2.5)) < 1e-9);
  for (double x : {2.6, 3.0, 4.0}) CHECK(c(x) == doctest::Approx(spiked_goe_rate(2.0, x)).epsilon(1e-7));
  double h = 1e-3;
  double curvature = (c(2.5 + h) - 2 * c(2.5) + c(2.5 - h)) / (h * h);
  CHECK(curvature == doctest::Approx(2.0 / 3.0).epsilon(1e-2));
}

TEST_CASE("spiked GOE rate below threshold") {
  auto c = rankone_curve(make_spike(goe(1.0), 0.5, ConvOp::add));
  for (double x : {2.2, 2.5, 3.0, 4.0}) CHECK(c(x) == doctest::Approx(spiked_goe_rate(0.5, x)).epsilon(1e-7));
}

TEST_CASE("multiplicative spike of MP(1)") {
  auto m = make_spike(wishart(1.0), 2.0, ConvOp::mul);
  CHECK(m.threshold == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bbp_top(m) == doctest::Approx(4.5).epsilon(1e-9));
  auto c = rankone_curve(m);
  CHECK(std::abs(c(4.5)) < 1e-9);
  CHECK(c(5.0) > 0.0);
  CHECK(c(5.5) > c(5.0));
}

TEST_CASE("rank-one plus rank-one") {
  Rk1PlusRk1 m{2.0, 1.0};
  CHECK(rk1rk1_rate(m, 2.5) == doctest::Approx(-0.5 * std::log(2.5 * 0.5 / 2.0)).epsilon(1e-12));
  CHECK(rk1rk1_rate(m, 2.0) == doctest::Approx(0.0).scale(1.0));
  int n = 64;
  double mass = boost::math::quadrature::tanh_sinh<double>().integrate([&](double l) { return rk1rk1_density(m, n, l); }, 2.0, 3.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  double tail = quad([&](double l) { return rk1rk1_density(m, n, l); }, 2.2, 3.0);
  CHECK(rk1rk1_tail(m, n, 2.2) == doctest::Approx(tail).epsilon(1e-8));
  auto s = rk1rk1_sample(m, n, 200000, 11);
  double hit = 0;
  for (double v : s) hit += v >= 2.2;
  CHECK(hit / s.size() == doctest::Approx(tail).epsilon(0.05));
  for (double n2 : {128.0, 1024.0}) CHECK(-std::log(rk1rk1_tail(m, int(n2), 2.2)) / n2 < -std::log(tail) / n);
}
