#include "ldrm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "ldrm/errors.hpp"

namespace ldrm {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

double kronrod(const RealFn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  if (a > b) return -kronrod(f, b, a, tol);
  double err = 0.0;
  return Kronrod::integrate(f, a, b, 10, tol, &err);
}

}  // namespace

double integrate(const RealFn& f, double a, double b, double tol) {
  return kronrod(f, a, b, tol);
}

double integrate_sqrt_left(const RealFn& f, double a, double b, double tol) {
  if (b == a) return 0.0;
  if (b < a) return -integrate(f, b, a, tol);
  auto g = [&](double u) { return 2.0 * u * f(a + u * u); };
  return kronrod(g, 0.0, std::sqrt(b - a), tol);
}

double integrate_singular_right(const RealFn& f, double a, double b, double tol) {
  if (b == a) return 0.0;
  // t = b - (b - a) e^{-s} clusters nodes at b and absorbs log singularities.
  double span = b - a;
  auto g = [&](double s) {
    double w = span * std::exp(-s);
    return w * f(b - w);
  };
  double total = 0.0;
  double s0 = 0.0;
  for (int k = 0; k < 12; ++k) {
    double s1 = s0 + 4.0;
    double piece = kronrod(g, s0, s1, tol);
    total += piece;
    s0 = s1;
    if (std::abs(piece) < tol * std::max(1.0, std::abs(total)) && k > 1) break;
  }
  return total;
}

double find_root(const RealFn& f, double lo, double hi, const char* where) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NonConvergence(std::string(where) + ": root not bracketed");
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(1e-300, std::min(std::abs(a), std::abs(b)));
  };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= 200) throw NonConvergence(std::string(where) + ": iteration limit");
  return 0.5 * (r.first + r.second);
}

double solve_monotone(const RealFn& f, double target, double lo, double hi, const char* where) {
  auto h = [&](double x) { return f(x) - target; };
  double hlo = h(lo);
  double hhi = h(hi);
  if (hlo == 0.0) return lo;
  if (hhi == 0.0) return hi;
  if ((hlo > 0) != (hhi > 0)) return find_root(h, lo, hi, where);
  double slack = 1e-7 * std::max(1.0, std::abs(target));
  if (std::abs(hlo) <= std::abs(hhi) && std::abs(hlo) <= slack) return lo;
  if (std::abs(hhi) < std::abs(hlo) && std::abs(hhi) <= slack) return hi;
  throw NonConvergence(std::string(where) + ": target outside monotone range");
}

double argmin(const RealFn& f, double lo, double hi) {
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits);
  double x = r.first;
  double h = 1e-5 * std::max(std::abs(x), 1e-12);
  if (x - 50 * h <= lo || x + 50 * h >= hi) return x;
  auto df = [&](double y) {
    double d = 1e-5 * std::abs(y);
    return (f(y + d) - f(y - d)) / (2 * d);
  };
  double a = x - 40 * h;
  double b = x + 40 * h;
  double da = df(a);
  double db = df(b);
  if (da < 0 && db > 0) {
    return find_root(df, a, b, "argmin refine");
  }
  return x;
}

}  // namespace ldrm
