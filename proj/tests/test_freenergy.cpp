#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldrm/freenergy.hpp"

using namespace ldrm;

TEST_CASE("tilt of a single GOE matrix") {
  auto conv = add_conv(goe(1.0), fixed_diagonal(SpectralDensity::dirac(0.0)));
  double x = 2.5;
  auto tm = make_tilt(conv, x);
  double g = (x - std::sqrt(x * x - 4)) / 2, gbar = (x + std::sqrt(x * x - 4)) / 2;
  CHECK(tilt_diff(tm, 0.5 * g) == 0.0);
  for (double th : {0.8, 1.3, 2.0, 3.5}) {
    double oracle = 0.5 * (x - 1 / th) - 0.5 * th;
    CHECK(tilt_diff(tm, th) == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(std::abs(tilt_diff(tm, gbar)) < 1e-9);
}

TEST_CASE("quenched derivatives of the single GOE") {
  auto conv = add_conv(goe(1.0), fixed_diagonal(SpectralDensity::dirac(0.0)));
  double x = 3.0, th = 1.5;
  CHECK(ssk_quenched_dtheta(conv, x, th) == doctest::Approx(0.5 * (x - 1 / th)).epsilon(1e-9));
  double g = (x - std::sqrt(x * x - 4)) / 2;
  CHECK(ssk_quenched_dx(conv, x, th) == doctest::Approx(0.5 * (th - g)).epsilon(1e-9));
  CHECK(ssk_annealed_dtheta(goe(1.0), th) == doctest::Approx(0.5 * th).epsilon(1e-12));
}

TEST_CASE("annealed derivative past the wall") {
  auto e = goe(1.0, 3.0);
  double gbar = (3 + std::sqrt(5.0)) / 2;
  CHECK(ssk_annealed_dtheta(e, 0.5 * gbar) == doctest::Approx(0.25 * gbar));
  CHECK(ssk_annealed_dtheta(e, 4.0) == doctest::Approx(0.5 * (3 - 0.25)));
}

TEST_CASE("tilt has one zero between the edge and the hard bound") {
  auto conv = add_conv(fixed_diagonal(SpectralDensity::semicircle(1.0)), fixed_diagonal(SpectralDensity::semicircle(0.9)));
  for (double x : {2.75, 2.85, 3.2, 3.7}) {
    auto tm = make_tilt(conv, x);
    int sign_changes = 0;
    double prev = 0.0;
    for (int i = 1; i <= 600; ++i) {
      double v = tilt_diff(tm, conv.principal(x) + 0.01 * std::pow(1.02, i));
      if (!std::isfinite(v)) break;
      if (i > 1 && ((prev > 0) != (v > 0)) && prev != 0.0) ++sign_changes;
      prev = v;
    }
    INFO("x = " << x);
    CHECK(sign_changes == 1);
  }
}
