#include "ldrm/ratefn.hpp"

#include <cmath>
#include <vector>

#include "ldrm/errors.hpp"

namespace ldrm {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// Shared state behind a RateCurve; all closures hold it by shared_ptr.
struct Engine {
  TiltModel tm;
  ConvOp op = ConvOp::add;
  double q = 1.0;
  double c_plus = 0.0;
  double h_edge = 0.0;
  double typical = 0.0;
  double x_c1 = kInf;
  double x_c2 = kInf;
  double hb = kInf;
  double K1 = 0.0;
  double K2 = 0.0;
  bool spiked = false;
  bool infinite = false;

  explicit Engine(const ConvolutionModel& conv) : tm(make_tilt(conv)), op(conv.op()), q(conv.q()) {
    const auto& c = tm.conv;
    c_plus = c.c_plus();
    h_edge = c.h_at_edge();
    hb = tm.hard_bound;
    typical = c_plus;
    if (std::isinf(h_edge)) {
      infinite = true;
      return;
    }
    x_c1 = first_critical();
    x_c2 = second_critical();
    if (x_c2 < x_c1) x_c2 = x_c1;
    spiked = tm.tau_a < h_edge * (1 - 1e-12);
    if (spiked) {
      typical = x_c1;
      K1 = 0.0;
    } else if (std::isfinite(x_c1)) {
      K1 = regime1(x_c1);
    }
    if (std::isfinite(x_c2) && x_c2 < hb) {
      K2 = K1 + integrate([this](double t) { return integrand(t); }, x_c1, x_c2);
    }
  }

  double first_critical() const {
    double ta = tm.tau_a;
    if (std::isinf(ta)) return kInf;
    if (std::isinf(tm.w_a)) return tm.conv.inverse(ta);
    switch (op) {
      case ConvOp::add: return tm.w_a + tm.lin_b(ta);
      case ConvOp::mul: return tm.w_a * tm.lin_b(ta);
      case ConvOp::rect: return x_regime2(ta);
    }
    return kInf;
  }

  double second_critical() const {
    double tb = tm.tau_b;
    if (std::isinf(tm.w_a) || std::isinf(tm.w_b)) return kInf;
    if (std::isinf(tb)) return hb;
    switch (op) {
      case ConvOp::add: return tm.w_a + tm.w_b - 1.0 / tb;
      case ConvOp::mul: return tm.w_a * tm.w_b * tb / (tb + 1.0);
      case ConvOp::rect: return x_regime3(tb);
    }
    return kInf;
  }

  // Position x at which theta is optimal in regime 2 (A saturated) and regime 3.
  double x_regime2(double th) const {
    switch (op) {
      case ConvOp::add: return tm.w_a + tm.lin_b(th);
      case ConvOp::mul: return tm.w_a * tm.lin_b(th);
      case ConvOp::rect: return u_inv(q, u_func(q, th * tm.w_a) + th * tm.lin_b(th)) / th;
    }
    return kInf;
  }

  double x_regime3(double th) const {
    return u_inv(q, u_func(q, th * tm.w_a) + u_func(q, th * tm.w_b)) / th;
  }

  double solve_increasing(const std::function<double(double)>& f, double x, double lo, double hi,
                          const char* where) const {
    if (std::isinf(hi)) {
      hi = std::max(2.0 * lo, 1.0);
      int k = 0;
      while (f(hi) < x) {
        hi *= 2.0;
        if (++k > 200) throw NonConvergence(where);
      }
    }
    if (f(lo) >= x) return lo;
    return solve_monotone(f, x, lo, hi, where);
  }

  int regime(double x) const {
    if (infinite || x < c_plus * (1 - 1e-15) - 1e-15 || x > hb) return 0;
    if (!spiked && x <= x_c1) return 1;
    if (x <= x_c2) return 2;
    return x < hb ? 3 : 0;
  }

  double theta_star(double x) const {
    int r = regime(x);
    if (r == 0) {
      if (x >= hb || infinite) return kInf;
      throw OutOfSupport("theta_star below c+");
    }
    if (r == 1) return x <= c_plus ? h_edge : tm.conv.second(x);
    if (r == 2) {
      if (std::isinf(tm.w_a)) return tm.tau_a;
      double lo = spiked ? 1e-12 * tm.tau_a : tm.tau_a;
      auto f = [this](double th) { return x_regime2(th); };
      return solve_increasing(f, x, lo, tm.tau_b, "theta_star regime 2");
    }
    switch (op) {
      case ConvOp::add: return 1.0 / (hb - x);
      case ConvOp::mul: return x / (hb - x);
      case ConvOp::rect: {
        auto f = [this](double th) { return x_regime3(th); };
        return solve_increasing(f, x, tm.tau_b, kInf, "theta_star regime 3");
      }
    }
    return kInf;
  }

  double integrand_at(double t, double th) const {
    const auto& c = tm.conv;
    if (std::isinf(th)) return kInf;
    switch (op) {
      case ConvOp::add: return 0.5 * (th - c.stieltjes(t));
      case ConvOp::mul: return 0.5 * ((th + 1.0) / t - c.stieltjes(t));
      case ConvOp::rect: return f_q_diff_over_q(q, th * t, c.principal(t) * t) / t;
    }
    return 0.0;
  }

  double integrand(double t) const { return integrand_at(t, theta_star(t)); }

  // Regime 1 as the tilt integral over theta between the two branches,
  // which avoids the cancellation of g-bar - g near c+.
  double regime1(double x) const {
    if (x <= c_plus) return 0.0;
    const auto& c = tm.conv;
    double lo = c.principal(x), hi = c.second(x);
    RealFn f;
    switch (op) {
      case ConvOp::add: f = [&c, x](double th) { return 0.5 * (x - c.inverse(th)); }; break;
      case ConvOp::mul: f = [&c, x](double th) { return 0.5 * std::log(x / c.inverse(th)); }; break;
      case ConvOp::rect:
        f = [&c, x, this](double th) { return (u_func(q, th * x) - u_func(q, th * c.inverse(th))) / th; };
        break;
    }
    return std::max(0.0, integrate(f, lo, hi));
  }

  double eval(double x) const {
    if (infinite) return kInf;
    int r = regime(x);
    if (r == 0) {
      // The right end is finite only when regime 3 is empty.
      if (near(x, hb) && std::isfinite(hb) && x_c2 >= hb) return eval_below_regime3(x_c2);
      return kInf;
    }
    if (r == 3) return eval_regime3(x);
    return eval_below_regime3(x);
  }

  double eval_below_regime3(double x) const {
    auto f = [this](double t) { return integrand(t); };
    if (!spiked && x <= x_c1) return regime1(x);
    return std::max(0.0, K1 + integrate(f, x_c1, x));
  }

  double eval_regime3(double x) const {
    const auto& c = tm.conv;
    auto g = [&c](double t) { return c.stieltjes(t); };
    switch (op) {
      case ConvOp::add:
        return K2 + 0.5 * std::log((hb - x_c2) / (hb - x)) - 0.5 * integrate(g, x_c2, x);
      case ConvOp::mul:
        return K2 + 0.5 * (std::log(x / (hb - x)) - std::log(x_c2 / (hb - x_c2))) - 0.5 * integrate(g, x_c2, x);
      case ConvOp::rect:
        return K2 + integrate([this](double t) { return integrand(t); }, x_c2, x);
    }
    return kInf;
  }

  double slope(double x) const {
    if (infinite) return kInf;
    int r = regime(x);
    if (r == 0) return kInf;
    return integrand(x);
  }
};

RateCurve make_curve(const ConvolutionModel& conv) {
  auto eng = std::make_shared<const Engine>(conv);
  RateCurve c;
  c.op = conv.op();
  c.c_plus = eng->c_plus;
  c.typical = eng->typical;
  c.x_c1 = eng->x_c1;
  c.x_c2 = eng->x_c2;
  c.hard_bound = eng->hb;
  c.K1 = eng->K1;
  c.K2 = eng->K2;
  c.infinite = eng->infinite;
  c.eval = [eng](double x) { return eng->eval(x); };
  c.theta_star = [eng](double x) { return eng->theta_star(x); };
  c.slope = [eng](double x) { return eng->slope(x); };
  return c;
}

void expect_op(const ConvolutionModel& conv, ConvOp op, const char* where) {
  if (conv.op() != op) throw Error(std::string(where) + ": wrong convolution type");
}

}  // namespace

int RateCurve::regime(double x) const {
  if (infinite || x < c_plus || x >= hard_bound) return 0;
  if (typical == c_plus && x <= x_c1) return 1;
  if (x <= x_c2) return 2;
  return 3;
}

double psi_one_matrix(const Ensemble& e, double x) {
  const auto& d = e.density;
  if (d.kind() == DensityKind::dirac) throw DegenerateDensity("psi_one_matrix of a dirac");
  double a = d.upper();
  if (x < a || x > e.wall) return kInf;
  if (x == a) return 0.0;
  auto f = [&e, &d](double t) { return 0.5 * (stieltjes_second(e, t) - stieltjes(d, t)); };
  return integrate_sqrt_left(f, a, x);
}

double phi_one_rect(const RectEnsemble& re, double x) {
  const auto& d = re.lsvd;
  if (d.kind() == DensityKind::dirac) throw DegenerateDensity("phi_one_rect of a dirac");
  double a = d.upper();
  if (x < a || x > re.wall) return kInf;
  if (x == a) return 0.0;
  auto f = [&re, &d](double t) { return t * (square_stieltjes_second(re, t) - square_stieltjes(d, t)); };
  return integrate_sqrt_left(f, a, x);
}

double phi_one_rect_conv(const RectEnsemble& re, double x) {
  RectEnsemble zero = fixed_rect(SpectralDensity::dirac(0.0), re.q);
  return rate_rect(rect_conv(re, zero, re.q)).eval(x);
}

RateCurve rate_sum(const ConvolutionModel& conv) {
  expect_op(conv, ConvOp::add, "rate_sum");
  return make_curve(conv);
}

RateCurve rate_prod(const ConvolutionModel& conv) {
  expect_op(conv, ConvOp::mul, "rate_prod");
  return make_curve(conv);
}

RateCurve rate_rect(const ConvolutionModel& conv) {
  expect_op(conv, ConvOp::rect, "rate_rect");
  return make_curve(conv);
}

RateCurve rate_curve(const ConvolutionModel& conv) { return make_curve(conv); }

std::function<double(double)> theta_star_sum(const ConvolutionModel& conv) { return rate_sum(conv).theta_star; }
std::function<double(double)> theta_star_prod(const ConvolutionModel& conv) { return rate_prod(conv).theta_star; }
std::function<double(double)> theta_star_rect(const ConvolutionModel& conv) { return rate_rect(conv).theta_star; }

double effective_potential(const RateCurve& curve, const ConvolutionModel& conv, double x) {
  if (conv.op() == ConvOp::rect) throw Error("effective_potential: defined for add and mul only");
  double c = curve.c_plus;
  if (x >= c) {
    double pi = curve.eval(x);
    if (std::isinf(pi)) return kInf;
    return 2.0 * pi + 2.0 * integrate([&conv](double t) { return conv.stieltjes(t); }, c, x);
  }
  double lower = conv.op() == ConvOp::add ? conv.left().density.lower() + conv.right().density.lower()
                                          : conv.left().density.lower() * conv.right().density.lower();
  if (x < lower) throw OutOfSupport("effective_potential below the support");
  auto re_g = [&conv](double t) { return conv_stieltjes_axis(conv, t).real(); };
  return -2.0 * integrate(re_g, x, c, 1e-9);
}

ScalingFit tw_scaling_check(const RateCurve& curve, double gamma0) {
  const int n = 13;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    double eps = std::pow(10.0, -6.0 + 3.0 * i / (n - 1));
    double v = curve.eval(curve.c_plus + eps);
    if (!(v > 0) || std::isinf(v)) throw NonConvergence("tw_scaling_check: rate not finite and positive near c+");
    lx[i] = std::log(eps);
    ly[i] = std::log(v);
  }
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.coefficient = std::exp(my - fit.exponent * mx);
  fit.expected_coefficient = 2.0 / 3.0 * std::pow(gamma0, 1.5);
  return fit;
}

}  // namespace ldrm
