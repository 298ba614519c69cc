#include "ldrm/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "ldrm/errors.hpp"

namespace ldrm {

namespace {

using cplx = std::complex<double>;

double edge_tol(double a) { return 1e-12 * std::max(1.0, std::abs(a)); }

bool at_edge(double x, double a) { return std::abs(x - a) <= edge_tol(a); }

double require_above(double z, double a, const char* where) {
  if (std::isnan(z) || z < a - edge_tol(a)) throw OutOfSupport(where);
  return std::max(z, a);
}

// Cauchy transform of a tabulated density at any z off its support (or at an end).
template <class Z>
Z tabulated_cauchy(const SpectralDensity& d, Z z) {
  Z total = 0.0;
  for (const auto& a : d.atoms()) total += a.mass / (z - a.position);
  const auto& xs = d.grid();
  const auto& ys = d.values();
  for (size_t i = 1; i < xs.size(); ++i) {
    double a = xs[i - 1], b = xs[i];
    double ya = ys[i - 1], yb = ys[i];
    if (ya == 0 && yb == 0) continue;
    double slope = (yb - ya) / (b - a);
    double h = 0.5 * (b - a), c = 0.5 * (a + b), ym = 0.5 * (ya + yb);
    Z w = z - c;
    if (std::abs(w) > 4 * h) {
      // Far from the segment the log form cancels; expand 1/(w - u) in u/w.
      Z r = h / w, rk = 1.0 / w, sum = 0.0;
      for (int k = 0; k < 60; ++k) {
        rk *= (k == 0 ? 1.0 : r);
        Z part = (k % 2 == 0) ? Z(ym * 2.0 * h / (k + 1)) * rk : Z(slope * 2.0 * h * h / (k + 2)) * rk;
        sum += part;
        if (std::abs(part) < 1e-17 * std::abs(sum)) break;
      }
      total += sum;
      continue;
    }
    Z yz = ya + slope * (z - a);
    Z term = -slope * (b - a);
    // At a node the log term tends to zero when the density vanishes there.
    bool at_a = std::abs(z - a) == 0.0, at_b = std::abs(z - b) == 0.0;
    if ((at_a && ya != 0) || (at_b && yb != 0)) return Z(kInf);
    if (!at_a && !at_b && std::abs(yz) > 0) term += yz * std::log((z - a) / (z - b));
    total += term;
  }
  return total;
}

double numeric_stieltjes(const SpectralDensity& d, double z) {
  if (d.kind() == DensityKind::tabulated) return tabulated_cauchy<double>(d, z);
  return d.expect([z](double l) { return 1.0 / (z - l); });
}

bool closed(const SpectralDensity& d) { return d.has_closed_form(); }

// Root of a decreasing (principal) or increasing (second) branch.
double invert_branch(const RealFn& fwd, bool increasing, double edge, double y, double scale, const char* where) {
  double step = std::max(scale, 1e-3);
  double hi = edge + step;
  for (int k = 0; k < 80; ++k) {
    double v = fwd(hi);
    if (increasing ? (v >= y) : (v <= y)) break;
    hi = edge + (hi - edge) * 2.0;
    if (hi - edge > 1e12) throw DomainExceeded(where);
  }
  return solve_monotone(fwd, y, edge, hi, where);
}

double width_of(const SpectralDensity& d) { return std::max(d.upper() - d.lower(), 1e-2 * std::max(1.0, std::abs(d.upper()))); }

}  // namespace

double stieltjes(const SpectralDensity& d, double z) {
  z = require_above(z, d.upper(), "stieltjes");
  if (closed(d)) {
    double s = d.param(0);
    switch (d.kind()) {
      case DensityKind::semicircle:
        return 2.0 / (z + std::sqrt(std::max(0.0, (z - 2 * s) * (z + 2 * s))));
      case DensityKind::marchenko_pastur: {
        double q = d.param(0), sc = d.param(1);
        double r = std::sqrt(std::max(0.0, (z - d.lower()) * (z - d.upper())));
        return 2.0 / (z - sc * (1 - q) + r);
      }
      case DensityKind::dirac:
        return z == s ? kInf : 1.0 / (z - s);
      default:
        break;
    }
  }
  if (d.kind() == DensityKind::dirac) return z == d.param(0) ? kInf : 1.0 / (z - d.param(0));
  return numeric_stieltjes(d, z);
}

cplx stieltjes(const SpectralDensity& d, cplx z) {
  if (closed(d)) {
    double s = d.param(0);
    switch (d.kind()) {
      case DensityKind::semicircle:
        return 2.0 / (z + std::sqrt(z - 2 * s) * std::sqrt(z + 2 * s));
      case DensityKind::marchenko_pastur: {
        double q = d.param(0), sc = d.param(1);
        return 2.0 / (z - sc * (1 - q) + std::sqrt(z - d.lower()) * std::sqrt(z - d.upper()));
      }
      case DensityKind::dirac:
        return 1.0 / (z - s);
      default:
        break;
    }
  }
  if (d.kind() == DensityKind::dirac) return 1.0 / (z - d.param(0));
  if (d.kind() == DensityKind::tabulated) return tabulated_cauchy<cplx>(d, z);
  double re = d.expect([z](double l) { return (1.0 / (z - l)).real(); }, 1e-10);
  double im = d.expect([z](double l) { return (1.0 / (z - l)).imag(); }, 1e-10);
  return {re, im};
}

double stieltjes_second(const Ensemble& e, double x) {
  double a = e.density.upper();
  x = require_above(x, a, "stieltjes_second");
  if (at_edge(x, a)) return stieltjes(e.density, a);
  if (!e.v_prime) throw DomainExceeded("stieltjes_second: no potential beyond the edge");
  return e.v_prime(x) - stieltjes(e.density, x);
}

double stieltjes_branch(const Ensemble& e, double x, Branch b) {
  return b == Branch::principal ? stieltjes(e.density, x) : stieltjes_second(e, x);
}

double t_transform(const SpectralDensity& d, double z) {
  z = require_above(z, d.upper(), "t_transform");
  if (d.kind() == DensityKind::dirac) {
    double a = d.param(0);
    return z == a ? kInf : a / (z - a);
  }
  return z * stieltjes(d, z) - 1.0;
}

double t_second(const Ensemble& e, double x) {
  double a = e.density.upper();
  x = require_above(x, a, "t_second");
  if (at_edge(x, a)) return t_transform(e.density, a);
  return x * stieltjes_second(e, x) - 1.0;
}

double square_stieltjes(const SpectralDensity& lsvd, double z) {
  z = require_above(z, lsvd.upper(), "square_stieltjes");
  if (closed(lsvd)) {
    double s = lsvd.param(0);
    switch (lsvd.kind()) {
      case DensityKind::quarter_circle:
        return stieltjes(SpectralDensity::marchenko_pastur(1.0, s * s), z * z);
      case DensityKind::gauss_rect_lsvd:
        return stieltjes(SpectralDensity::marchenko_pastur(lsvd.param(1), s * s), z * z);
      case DensityKind::dirac:
        return z == s ? kInf : 1.0 / (z * z - s * s);
      default:
        break;
    }
  }
  if (lsvd.kind() == DensityKind::dirac) {
    double s = lsvd.param(0);
    return z == s ? kInf : 1.0 / (z * z - s * s);
  }
  if (lsvd.kind() == DensityKind::tabulated)
    return (tabulated_cauchy<double>(lsvd, z) - tabulated_cauchy<double>(lsvd, -z)) / (2 * z);
  return lsvd.expect([z](double s) { return 1.0 / (z * z - s * s); });
}

double square_stieltjes_second(const RectEnsemble& r, double z) {
  double a = r.lsvd.upper();
  z = require_above(z, a, "square_stieltjes_second");
  if (at_edge(z, a)) return square_stieltjes(r.lsvd, a);
  if (!r.v_prime_tilde) throw DomainExceeded("square_stieltjes_second: no potential beyond the edge");
  return r.v_prime_tilde(z * z) - square_stieltjes(r.lsvd, z);
}

namespace {
double d_from_g(double q, double z, double g) {
  if (std::isinf(g)) return kInf;
  return std::sqrt(std::max(0.0, q * z * z * g * g + (1 - q) * g));
}
}  // namespace

double d_transform(const SpectralDensity& lsvd, double q, double z) {
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("d_transform");
  return d_from_g(q, z, square_stieltjes(lsvd, z));
}

double d_second(const RectEnsemble& r, double x) {
  double a = r.lsvd.upper();
  x = require_above(x, a, "d_second");
  return d_from_g(r.q, x, square_stieltjes_second(r, x));
}

TransformDomain domain(const Ensemble& e) {
  TransformDomain dom;
  const auto& d = e.density;
  double a = d.upper();
  if (d.kind() == DensityKind::dirac) return dom;
  if (!e.v_prime) {
    dom.r_A = stieltjes(d, a);
    if (d.lower() >= 0) dom.s_A = t_transform(d, a);
    return dom;
  }
  if (closed(d) && d.kind() == DensityKind::semicircle) {
    dom.r_A = kInf;
    dom.s_A = kInf;
    return dom;
  }
  if (closed(d) && d.kind() == DensityKind::marchenko_pastur) {
    dom.r_A = 1.0 / (d.param(0) * d.param(1));
    dom.s_A = kInf;
    return dom;
  }
  double far = a + 1e6 * width_of(d);
  double gb = stieltjes_second(e, far);
  dom.r_A = gb > 1e5 ? kInf : gb;
  if (d.lower() >= 0) {
    double tb = t_second(e, far);
    dom.s_A = tb > 1e5 ? kInf : tb;
  }
  return dom;
}

TransformDomain domain(const RectEnsemble& r) {
  TransformDomain dom;
  const auto& d = r.lsvd;
  double a = d.upper();
  if (d.kind() == DensityKind::dirac) return dom;
  if (!r.v_prime_tilde) {
    dom.c_A = d_transform(d, r.q, a);
    return dom;
  }
  if (closed(d) && (d.kind() == DensityKind::quarter_circle || d.kind() == DensityKind::gauss_rect_lsvd)) {
    dom.c_A = kInf;
    return dom;
  }
  double far = a + 1e6 * width_of(d);
  double db = d_second(r, far);
  dom.c_A = db > 1e5 ? kInf : db;
  return dom;
}

double stieltjes_inverse(const Ensemble& e, double y) {
  const auto& d = e.density;
  if (!(y > 0)) throw DomainExceeded("stieltjes_inverse: y must be positive");
  if (d.kind() == DensityKind::dirac) return d.param(0) + 1.0 / y;
  double sup = domain(e).r_A;
  if (y > sup * (1 + 1e-12)) throw DomainExceeded("stieltjes_inverse: y beyond r_A");
  if (closed(d) && (d.kind() == DensityKind::semicircle || d.kind() == DensityKind::marchenko_pastur))
    return r_transform(e, y) + 1.0 / y;
  double a = d.upper();
  double ga = stieltjes(d, a);
  if (y <= ga) {
    return invert_branch([&](double z) { return stieltjes(d, z); }, false, a, y, width_of(d), "stieltjes_inverse");
  }
  return invert_branch([&](double z) { return stieltjes_second(e, z); }, true, a, y, width_of(d),
                       "stieltjes_inverse (second branch)");
}

double r_transform(const Ensemble& e, double y) {
  const auto& d = e.density;
  if (!(y > 0)) {
    if (y == 0) return d.mean();
    throw DomainExceeded("r_transform: y must be nonnegative");
  }
  if (d.kind() == DensityKind::dirac) return d.param(0);
  if (closed(d)) {
    double sup = domain(e).r_A;
    if (y > sup * (1 + 1e-12)) throw DomainExceeded("r_transform: y beyond r_A");
    if (d.kind() == DensityKind::semicircle) return d.param(0) * d.param(0) * y;
    if (d.kind() == DensityKind::marchenko_pastur) {
      double q = d.param(0), s = d.param(1);
      return s / (1.0 - q * s * y);
    }
  }
  return stieltjes_inverse(e, y) - 1.0 / y;
}

double r_transform(const SpectralDensity& d, double y) { return r_transform(fixed_diagonal(d), y); }

double t_inverse(const Ensemble& e, double y) {
  const auto& d = e.density;
  if (!(y > 0)) throw DomainExceeded("t_inverse: y must be positive");
  if (d.lower() < 0) throw Error("t_inverse: density must be nonnegative");
  if (d.kind() == DensityKind::dirac) return d.param(0) * (y + 1) / y;
  double sup = domain(e).s_A;
  if (y > sup * (1 + 1e-12)) throw DomainExceeded("t_inverse: y beyond s_A");
  if (closed(d) && d.kind() == DensityKind::marchenko_pastur) return s_transform(e, y) * (y + 1) / y;
  double a = d.upper();
  double ta = t_transform(d, a);
  if (y <= ta) return invert_branch([&](double z) { return t_transform(d, z); }, false, a, y, width_of(d), "t_inverse");
  return invert_branch([&](double z) { return t_second(e, z); }, true, a, y, width_of(d), "t_inverse (second branch)");
}

double s_transform(const Ensemble& e, double y) {
  const auto& d = e.density;
  if (d.lower() < 0) throw Error("s_transform: density must be nonnegative");
  if (!(y > 0)) {
    if (y == 0) return d.mean();
    throw DomainExceeded("s_transform: y must be nonnegative");
  }
  if (d.kind() == DensityKind::dirac) return d.param(0);
  if (closed(d) && d.kind() == DensityKind::marchenko_pastur) {
    double sup = domain(e).s_A;
    if (y > sup * (1 + 1e-12)) throw DomainExceeded("s_transform: y beyond s_A");
    return d.param(1) * (1 + d.param(0) * y);
  }
  return t_inverse(e, y) * y / (y + 1);
}

double s_transform(const SpectralDensity& d, double y) { return s_transform(fixed_diagonal(d), y); }

namespace {
bool gauss_rect_closed(const RectEnsemble& r) {
  const auto& d = r.lsvd;
  if (!closed(d)) return false;
  if (d.kind() == DensityKind::quarter_circle) return r.q == 1.0;
  if (d.kind() == DensityKind::gauss_rect_lsvd) return d.param(1) == r.q;
  return false;
}
}  // namespace

double d_inverse(const RectEnsemble& r, double y) {
  const auto& d = r.lsvd;
  if (!(y > 0)) throw DomainExceeded("d_inverse: y must be positive");
  double sup = domain(r).c_A;
  if (y > sup * (1 + 1e-12)) throw DomainExceeded("d_inverse: y beyond c_A");
  if (gauss_rect_closed(r)) {
    double s2 = d.param(0) * d.param(0);
    return u_inv(r.q, s2 * y * y) / y;
  }
  if (d.kind() == DensityKind::dirac) {
    // y^2 u^2 = u + q s^2 with u = z^2 - s^2.
    double s2 = d.param(0) * d.param(0);
    double u = (1.0 + std::sqrt(1.0 + 4.0 * y * y * r.q * s2)) / (2.0 * y * y);
    return std::sqrt(s2 + u);
  }
  double a = d.upper();
  double da = d_transform(d, r.q, a);
  if (y <= da)
    return invert_branch([&](double z) { return d_transform(d, r.q, z); }, false, a, y, width_of(d), "d_inverse");
  return invert_branch([&](double z) { return d_second(r, z); }, true, a, y, width_of(d), "d_inverse (second branch)");
}

double c_transform(const RectEnsemble& r, double y) {
  if (!(y > 0)) {
    if (y == 0) return 0.0;
    throw DomainExceeded("c_transform: y must be nonnegative");
  }
  if (gauss_rect_closed(r)) {
    double sup = domain(r).c_A;
    if (y > sup * (1 + 1e-12)) throw DomainExceeded("c_transform: y beyond c_A");
    return r.lsvd.param(0) * r.lsvd.param(0) * y;
  }
  // C-tilde is nonnegative; rounding in y d^{-1}(y) ~ 1 can push U below zero for tiny y.
  return std::max(0.0, u_func(r.q, y * d_inverse(r, y))) / y;
}

double gbar_at_wall(const Ensemble& e) {
  const auto& d = e.density;
  double a = d.upper();
  if (d.kind() == DensityKind::dirac) return e.wall > a ? 1.0 / (e.wall - a) : kInf;
  if (std::isinf(e.wall)) return domain(e).r_A;
  if (at_edge(e.wall, a)) return stieltjes(d, a);
  return stieltjes_second(e, e.wall);
}

double tbar_at_wall(const Ensemble& e) {
  const auto& d = e.density;
  double a = d.upper();
  if (d.kind() == DensityKind::dirac) return e.wall > a ? d.param(0) / (e.wall - a) : kInf;
  if (std::isinf(e.wall)) return domain(e).s_A;
  if (at_edge(e.wall, a)) return t_transform(d, a);
  return t_second(e, e.wall);
}

double dbar_at_wall(const RectEnsemble& r) {
  const auto& d = r.lsvd;
  double a = d.upper();
  if (d.kind() == DensityKind::dirac) return r.wall > a ? d_transform(d, r.q, r.wall) : kInf;
  if (std::isinf(r.wall)) return domain(r).c_A;
  if (at_edge(r.wall, a)) return d_transform(d, r.q, a);
  return d_second(r, r.wall);
}

double u_func(double q, double y) {
  // (-1 - q + sqrt((1-q)^2 + 4 q y^2)) / (2q), rationalised.
  double root = std::sqrt((1 - q) * (1 - q) + 4 * q * y * y);
  return 2.0 * (y * y - 1.0) / (root + 1.0 + q);
}

double u_inv(double q, double z) {
  if (z < -1e-15) throw DomainExceeded("u_inv: argument must be nonnegative");
  z = std::max(z, 0.0);
  return std::sqrt((1 + z) * (1 + q * z));
}

double f_q(double q, double z) { return 0.5 * std::sqrt((1 - q) * (1 - q) + 4 * q * z * z); }

double f_q_diff_over_q(double q, double a, double b) {
  if (std::isinf(a)) return kInf;
  return (a * a - b * b) / (f_q(q, a) + f_q(q, b));
}

EdgeRecovery edge_from_inverse(const RealFn& g_inv, double y_lo, double y_hi, bool hi_unbounded) {
  if (!(y_lo > 0) || !(y_hi > y_lo)) throw NonConvergence("edge_from_inverse: empty domain");
  const int n = 240;
  double ratio = std::log(y_hi / y_lo) / (n - 1);
  int best = 0;
  double best_val = kInf;
  std::vector<double> ys(n), vs(n);
  for (int k = 0; k < n; ++k) {
    ys[k] = (k == n - 1) ? y_hi : y_lo * std::exp(ratio * k);
    vs[k] = g_inv(ys[k]);
    if (vs[k] < best_val) {
      best_val = vs[k];
      best = k;
    }
  }
  if (best == 0) throw NonConvergence("edge_from_inverse: inverse not decreasing near zero");
  if (best == n - 1) {
    return {vs[n - 1], hi_unbounded ? kInf : y_hi};
  }
  double y = argmin(g_inv, ys[best - 1], ys[best + 1]);
  return {g_inv(y), y};
}

}  // namespace ldrm
