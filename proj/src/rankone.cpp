#include "ldrm/rankone.hpp"

#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "ldrm/errors.hpp"

namespace ldrm {

SpikeModel make_spike(const Ensemble& base, double gamma, ConvOp op) {
  if (!(gamma > 0)) throw DomainExceeded("make_spike: gamma must be positive");
  if (op == ConvOp::rect) throw Error("make_spike: use bbp_rect_threshold for rectangular spikes");
  SpikeModel m{base, gamma, op};
  double b = base.density.upper();
  if (op == ConvOp::add) {
    m.threshold = 1.0 / stieltjes(base.density, b);
    m.typical_top = gamma > m.threshold ? r_transform(base, 1.0 / gamma) + gamma : b;
  } else {
    if (base.density.lower() < 0) throw Error("make_spike: multiplicative spike needs a nonnegative spectrum");
    m.threshold = 1.0 / t_transform(base.density, b);
    m.typical_top = gamma > m.threshold ? s_transform(base, 1.0 / gamma) * (1.0 + gamma) : b;
  }
  return m;
}

double bbp_top(const SpikeModel& m) { return m.typical_top; }

RateCurve rankone_curve(const SpikeModel& m) {
  if (m.op == ConvOp::add) return rate_sum(add_conv(rank_one(m.gamma), m.base));
  return rate_prod(mul_conv(rank_one(m.gamma, 1.0), m.base));
}

double rate_rankone_add(const SpikeModel& m, double x) {
  if (m.op != ConvOp::add) throw Error("rate_rankone_add: model is multiplicative");
  return rankone_curve(m).eval(x);
}

double rate_rankone_mul(const SpikeModel& m, double x) {
  if (m.op != ConvOp::mul) throw Error("rate_rankone_mul: model is additive");
  return rankone_curve(m).eval(x);
}

double bbp_rect_threshold(const RectEnsemble& re, double gamma) {
  const auto& d = re.lsvd;
  double b = d.upper();
  double thr = 1.0 / d_transform(d, re.q, b);
  if (gamma <= thr) return b;
  double target = 1.0 / gamma;
  auto f = [&](double s) { return d_transform(d, re.q, s); };
  double hi = b + std::max(1.0, b);
  for (int k = 0; k < 200 && f(hi) > target; ++k) hi = b + 2.0 * (hi - b);
  return solve_monotone(f, target, b, hi, "bbp_rect_threshold");
}

namespace {
void check_rk1(const Rk1PlusRk1& m) {
  if (!(m.w_a >= m.w_b && m.w_b > 0)) throw DomainExceeded("rank-one plus rank-one needs w_A >= w_B > 0");
}
}  // namespace

double rk1rk1_density(const Rk1PlusRk1& m, int n, double lambda) {
  check_rk1(m);
  double a = m.w_a, b = m.w_b;
  if (lambda <= a || lambda >= a + b) return 0.0;
  double u = lambda * (a + b - lambda) / (a * b);
  double log_beta = std::lgamma(0.5) + std::lgamma(0.5 * n) - std::lgamma(0.5 * n + 0.5);
  double log_pref = std::log((2 * lambda - a - b) / (a * b)) - log_beta;
  return std::exp(log_pref - 0.5 * std::log1p(-u) + (0.5 * n - 1.0) * std::log(u));
}

double rk1rk1_tail(const Rk1PlusRk1& m, int n, double x) {
  check_rk1(m);
  double a = m.w_a, b = m.w_b;
  if (x <= a) return 1.0;
  if (x >= a + b) return 0.0;
  double phi = (x - a) * (x - b) / (a * b);
  return boost::math::ibetac(0.5, 0.5 * n, phi);
}

double rk1rk1_rate(const Rk1PlusRk1& m, double x) {
  check_rk1(m);
  double a = m.w_a, b = m.w_b;
  if (x < a || x >= a + b) return kInf;
  return -0.5 * std::log(x * (a + b - x) / (a * b));
}

std::vector<double> rk1rk1_sample(const Rk1PlusRk1& m, int n, long count, std::uint64_t seed) {
  check_rk1(m);
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> ga(0.5, 1.0), gb(0.5 * n, 1.0);
  double a = m.w_a, b = m.w_b;
  std::vector<double> out(count);
  for (long i = 0; i < count; ++i) {
    double x = ga(rng), y = gb(rng);
    double phi = x / (x + y);
    out[i] = 0.5 * (a + b + std::sqrt((a - b) * (a - b) + 4 * a * b * phi));
  }
  return out;
}

}  // namespace ldrm
