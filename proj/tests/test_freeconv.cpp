#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldrm/freeconv.hpp"
#include "ldrm/transforms.hpp"

using namespace ldrm;

TEST_CASE("free sum of semicircles is a semicircle") {
  auto m = add_conv(fixed_diagonal(SpectralDensity::semicircle(1.0)), fixed_diagonal(SpectralDensity::semicircle(0.9)));
  double s = std::sqrt(1.81);
  CHECK(m.c_plus() == doctest::Approx(2 * s).epsilon(1e-10));
  CHECK(m.c_plus() <= 2.0 + 1.8);
  for (double x : {4.0, 5.0}) CHECK(m.stieltjes(x) == doctest::Approx((x - std::sqrt(x * x - 4 * s * s)) / (2 * s * s)).epsilon(1e-8));
  for (double y : {0.1, 0.3}) CHECK(m.inverse(y) == doctest::Approx(1 / y + 1.81 * y).epsilon(1e-9));
  std::vector<double> xs{-2.5, -1.0, 0.0, 1.3, 2.6};
  auto ys = density_values(m, xs);
  auto oracle = SpectralDensity::semicircle(s);
  for (size_t i = 0; i < xs.size(); ++i) CHECK(ys[i] == doctest::Approx(oracle(xs[i])).epsilon(1e-5));
  auto g = conv_stieltjes(m, {0.5, 0.8});
  std::complex<double> z{0.5, 0.8};
  auto gz = (z - std::sqrt(z - 2 * s) * std::sqrt(z + 2 * s)) / (2 * s * s);
  CHECK(std::abs(g - gz) < 1e-9);
}

TEST_CASE("adding a null matrix leaves the edge unchanged") {
  auto m = add_conv(goe(1.0), fixed_diagonal(SpectralDensity::dirac(0.0)));
  CHECK(m.c_plus() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(m.principal(3.0) == doctest::Approx((3 - std::sqrt(5.0)) / 2).epsilon(1e-9));
}

TEST_CASE("product of two free Marchenko-Pastur laws has the Fuss-Catalan edge") {
  auto mp = SpectralDensity::marchenko_pastur(1.0);
  auto m = mul_conv(fixed_diagonal(mp), fixed_diagonal(mp));
  CHECK(m.c_plus() == doctest::Approx(27.0 / 4.0).epsilon(1e-8));
  CHECK(m.c_plus() <= 16.0);
  auto id = mul_conv(wishart(1.0), fixed_diagonal(SpectralDensity::dirac(1.0)));
  CHECK(id.c_plus() == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("rectangular sum of Gaussian matrices is Gaussian") {
  auto m = rect_conv(ginibre(1.0), ginibre(1.0), 1.0);
  CHECK(m.c_plus() == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-8));
  auto r = rect_conv(gauss_rect(1.0, 0.5), gauss_rect(0.5, 0.5), 0.5);
  double s = std::hypot(1.0, 0.5);
  CHECK(r.c_plus() == doctest::Approx(s * (1 + std::sqrt(0.5))).epsilon(1e-8));
  auto ys = density_values(m, {0.5, 1.5});
  auto qc = SpectralDensity::quarter_circle(std::sqrt(2.0));
  CHECK(ys[0] == doctest::Approx(qc(0.5)).epsilon(1e-6));
  CHECK(ys[1] == doctest::Approx(qc(1.5)).epsilon(1e-6));
}

TEST_CASE("principal and second branches bracket the edge value") {
  auto m = add_conv(goe(1.0, 3.0), wishart(0.5, 4.0));
  double ge = m.h_at_edge();
  for (double x : {m.c_plus() + 0.1, m.c_plus() + 1.0}) {
    CHECK(m.principal(x) < ge);
    CHECK(m.second(x) > ge);
    CHECK(m.inverse(m.principal(x)) == doctest::Approx(x).epsilon(1e-9));
    CHECK(m.inverse(m.second(x)) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("tabulated operands reproduce the closed-form edge") {
  auto tab = [](double s) {
    return SpectralDensity::tabulate([s](double x) { return std::sqrt(std::max(0.0, 4 * s * s - x * x)); }, {-2 * s, 2 * s}, 512);
  };
  auto m = add_conv(fixed_diagonal(tab(1.0)), fixed_diagonal(tab(0.9)));
  CHECK(m.c_plus() == doctest::Approx(2 * std::sqrt(1.81)).epsilon(1e-4));
  auto qc = [](double s) {
    return SpectralDensity::tabulate([s](double x) { return std::sqrt(std::max(0.0, 4 * s * s - x * x)); }, {0.0, 2 * s}, 512);
  };
  auto r = rect_conv(fixed_rect(qc(1.0), 1.0), fixed_rect(qc(1.0), 1.0), 1.0);
  CHECK(r.c_plus() == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-4));
}
