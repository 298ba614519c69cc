#include "ldrm/freeconv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldrm/errors.hpp"

namespace ldrm {

namespace {

using cplx = std::complex<double>;

bool is_dirac(const SpectralDensity& d) { return d.kind() == DensityKind::dirac; }

cplx ens_g(const Ensemble& e, cplx w) { return stieltjes(e.density, w); }

// Additive subordination in the upper half-plane: w = z + h_B(z + h_A(w)), h = 1/g - id.
cplx add_subordination(const Ensemble& A, const Ensemble& B, cplx z, cplx& w) {
  auto h = [](const Ensemble& e, cplx u) { return 1.0 / ens_g(e, u) - u; };
  for (int it = 0; it < 10000; ++it) {
    cplx next = z + h(B, z + h(A, w));
    if (!(next.imag() > 0)) next = cplx(next.real(), std::max(z.imag(), 1e-300));
    cplx upd = 0.5 * (w + next);
    if (std::abs(upd - w) <= 1e-14 * std::max(1.0, std::abs(w))) {
      w = upd;
      return ens_g(A, w);
    }
    w = upd;
  }
  throw NonConvergence("additive subordination");
}

// Multiplicative subordination: w2 = z k_A(w1), w1 = z k_B(w2), k(w) = (1 + t(w)) / (t(w) w).
cplx mul_subordination(const Ensemble& A, const Ensemble& B, cplx z, cplx& w1) {
  auto k = [](const Ensemble& e, cplx u) {
    cplx t = u * ens_g(e, u) - 1.0;
    return (1.0 + t) / (t * u);
  };
  for (int it = 0; it < 10000; ++it) {
    cplx w2 = z * k(A, w1);
    cplx next = z * k(B, w2);
    cplx upd = 0.5 * (w1 + next);
    if (std::abs(upd - w1) <= 1e-14 * std::max(1.0, std::abs(w1))) {
      w1 = upd;
      cplx t = w1 * ens_g(A, w1) - 1.0;
      return (t + 1.0) / z;
    }
    w1 = upd;
  }
  throw NonConvergence("multiplicative subordination");
}

}  // namespace

void ConvolutionModel::build() {
  if (op_ == ConvOp::add) {
    if (is_dirac(a_.density) && is_dirac(b_.density)) throw DegenerateDensity("add_conv of two diracs");
    y_max_ = std::min(domain(a_).r_A, domain(b_).r_A);
  } else if (op_ == ConvOp::mul) {
    if (a_.density.lower() < 0 || b_.density.lower() < 0) throw Error("mul_conv needs nonnegative spectra");
    if (is_dirac(a_.density) && is_dirac(b_.density)) throw DegenerateDensity("mul_conv of two diracs");
    y_max_ = std::min(domain(a_).s_A, domain(b_).s_A);
  } else {
    if (is_dirac(ra_.lsvd) && is_dirac(rb_.lsvd)) throw DegenerateDensity("rect_conv of two diracs");
    y_max_ = std::min(domain(ra_).c_A, domain(rb_).c_A);
  }
  bool unbounded = std::isinf(y_max_);
  double hi = unbounded ? 1e8 : y_max_;
  if (!unbounded && !std::isfinite(inverse(hi))) hi = y_max_ * (1 - 1e-12);
  auto inv = [this](double y) { return inverse(y); };
  EdgeRecovery er = edge_from_inverse(inv, 1e-8, hi, unbounded);
  c_plus_ = er.edge;
  h_edge_ = er.value;
  if (!unbounded && er.value == hi) h_edge_ = hi;
  double bound = std::min(h_left_at_edge(), h_right_at_edge());
  if (h_edge_ > bound * (1 + 1e-9) + 1e-12) {
    std::ostringstream os;
    os << "edge inequality violated: " << h_edge_ << " > " << bound;
    throw Error(os.str());
  }
}

double ConvolutionModel::linearizer_left(double y) const {
  switch (op_) {
    case ConvOp::add: return r_transform(a_, y);
    case ConvOp::mul: return s_transform(a_, y);
    case ConvOp::rect: return c_transform(ra_, y);
  }
  return 0.0;
}

double ConvolutionModel::linearizer_right(double y) const {
  switch (op_) {
    case ConvOp::add: return r_transform(b_, y);
    case ConvOp::mul: return s_transform(b_, y);
    case ConvOp::rect: return c_transform(rb_, y);
  }
  return 0.0;
}

double ConvolutionModel::linearizer(double y) const {
  if (op_ == ConvOp::mul) return linearizer_left(y) * linearizer_right(y);
  return linearizer_left(y) + linearizer_right(y);
}

double ConvolutionModel::inverse(double y) const {
  if (!(y > 0)) throw DomainExceeded("convolution inverse: y must be positive");
  switch (op_) {
    case ConvOp::add: return linearizer(y) + 1.0 / y;
    case ConvOp::mul: return linearizer(y) * (y + 1) / y;
    case ConvOp::rect: return u_inv(q_, y * linearizer(y)) / y;
  }
  return 0.0;
}

double ConvolutionModel::principal(double x) const {
  double tol = 1e-12 * std::max(1.0, std::abs(c_plus_));
  if (x < c_plus_ - tol) throw OutOfSupport("convolution principal branch below c+");
  if (x <= c_plus_) return h_edge_;
  auto inv = [this](double y) { return inverse(y); };
  double top = std::isinf(h_edge_) ? 1.0 : h_edge_;
  if (std::isinf(h_edge_)) {
    for (int k = 0; k < 200 && inverse(top) > x; ++k) top *= 2.0;
  }
  double lo = 0.5 * top;
  for (int k = 0; k < 400 && inverse(lo) < x; ++k) lo *= 0.5;
  return solve_monotone(inv, x, lo, top, "convolution principal branch");
}

double ConvolutionModel::second(double x) const {
  if (std::isinf(h_edge_)) throw DomainExceeded("convolution has no second branch");
  double tol = 1e-12 * std::max(1.0, std::abs(c_plus_));
  if (x < c_plus_ - tol) throw OutOfSupport("convolution second branch below c+");
  if (x <= c_plus_) return h_edge_;
  auto inv = [this](double y) { return inverse(y); };
  double hi;
  if (std::isinf(y_max_)) {
    hi = 2.0 * h_edge_;
    for (int k = 0; k < 200 && inverse(hi) < x; ++k) hi *= 2.0;
  } else {
    hi = y_max_;
    double v = inverse(hi);
    if (!std::isfinite(v)) {
      hi = y_max_ * (1 - 1e-12);
      v = inverse(hi);
    }
    if (v < x - 1e-12 * std::max(1.0, std::abs(x))) throw DomainExceeded("convolution second branch beyond y_max");
  }
  return solve_monotone(inv, x, h_edge_, hi, "convolution second branch");
}

namespace {
double g_from_d(double q, double x, double d) {
  if (std::isinf(d)) return kInf;
  double d2 = d * d;
  return 2 * d2 / ((1 - q) + std::sqrt((1 - q) * (1 - q) + 4 * q * x * x * d2));
}
}  // namespace

double ConvolutionModel::stieltjes(double x) const {
  double h = principal(x);
  switch (op_) {
    case ConvOp::add: return h;
    case ConvOp::mul: return (h + 1) / x;
    case ConvOp::rect: return g_from_d(q_, x, h);
  }
  return h;
}

double ConvolutionModel::stieltjes_second(double x) const {
  double h = second(x);
  switch (op_) {
    case ConvOp::add: return h;
    case ConvOp::mul: return (h + 1) / x;
    case ConvOp::rect: return g_from_d(q_, x, h);
  }
  return h;
}

double ConvolutionModel::h_left_at_edge() const {
  switch (op_) {
    case ConvOp::add: return ldrm::stieltjes(a_.density, a_.density.upper());
    case ConvOp::mul: return t_transform(a_.density, a_.density.upper());
    case ConvOp::rect: return d_transform(ra_.lsvd, q_, ra_.lsvd.upper());
  }
  return kInf;
}

double ConvolutionModel::h_right_at_edge() const {
  switch (op_) {
    case ConvOp::add: return ldrm::stieltjes(b_.density, b_.density.upper());
    case ConvOp::mul: return t_transform(b_.density, b_.density.upper());
    case ConvOp::rect: return d_transform(rb_.lsvd, q_, rb_.lsvd.upper());
  }
  return kInf;
}

std::string ConvolutionModel::describe() const {
  std::ostringstream os;
  switch (op_) {
    case ConvOp::add: os << a_.density.describe() << " (+) " << b_.density.describe(); break;
    case ConvOp::mul: os << a_.density.describe() << " (x) " << b_.density.describe(); break;
    case ConvOp::rect: os << ra_.lsvd.describe() << " (+)_q " << rb_.lsvd.describe() << " q=" << q_; break;
  }
  return os.str();
}

ConvolutionModel add_conv(const Ensemble& A, const Ensemble& B) {
  ConvolutionModel m;
  m.op_ = ConvOp::add;
  m.a_ = A;
  m.b_ = B;
  m.build();
  return m;
}

ConvolutionModel mul_conv(const Ensemble& A, const Ensemble& B) {
  ConvolutionModel m;
  m.op_ = ConvOp::mul;
  m.a_ = A;
  m.b_ = B;
  m.build();
  return m;
}

ConvolutionModel rect_conv(const RectEnsemble& A, const RectEnsemble& B, double q) {
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("rect_conv: q must lie in (0, 1]");
  if (A.q != q || B.q != q) throw InvalidShapeRatio("rect_conv: operands have a different shape ratio");
  ConvolutionModel m;
  m.op_ = ConvOp::rect;
  m.q_ = q;
  m.ra_ = A;
  m.rb_ = B;
  m.build();
  return m;
}

cplx conv_stieltjes(const ConvolutionModel& m, cplx z) {
  bool lower = z.imag() < 0;
  cplx zu = lower ? std::conj(z) : z;
  if (!(zu.imag() > 0)) throw DomainExceeded("conv_stieltjes needs Im z != 0");
  cplx g;
  if (m.op() == ConvOp::add) {
    cplx w = zu;
    g = add_subordination(m.left(), m.right(), zu, w);
  } else if (m.op() == ConvOp::mul) {
    cplx w = zu;
    g = mul_subordination(m.left(), m.right(), zu, w);
  } else {
    throw Error("conv_stieltjes: rectangular convolution has no complex evaluator");
  }
  return lower ? std::conj(g) : g;
}

cplx conv_stieltjes_axis(const ConvolutionModel& m, double x) {
  if (m.op() == ConvOp::rect) throw Error("conv_stieltjes_axis: rectangular convolution has no complex evaluator");
  // Continuation in eps keeps the fixed-point iteration warm near the axis. At
  // a square-root edge the iteration stalls; the last converged value is kept.
  cplx w(x, 1.0), g;
  for (double eps = 1e-1; eps >= 1e-7; eps *= 0.1) {
    cplx z(x, eps), trial = w;
    try {
      g = m.op() == ConvOp::add ? add_subordination(m.left(), m.right(), z, trial)
                                : mul_subordination(m.left(), m.right(), z, trial);
    } catch (const NonConvergence&) {
      if (eps == 1e-1) throw;
      break;
    }
    w = trial;
  }
  return g;
}

namespace {

// Density of the operands' symmetrised additive convolution, for rect at q = 1.
Ensemble sym_ensemble(const RectEnsemble& r) {
  Ensemble e;
  e.density = symmetrize(r.lsvd);
  e.wall = e.density.upper();
  return e;
}

double plemelj(const std::function<cplx(cplx, cplx&)>& g_at, double x, cplx& w) {
  // Continuation in eps keeps the fixed-point iteration warm near the axis.
  double eps = 1e-1;
  cplx g;
  while (true) {
    g = g_at(cplx(x, eps), w);
    if (eps <= 1e-6) break;
    eps = std::max(eps * 0.1, 1e-6);
  }
  return std::max(0.0, -g.imag() / std::numbers::pi);
}

}  // namespace

std::vector<double> density_values(const ConvolutionModel& m, const std::vector<double>& grid) {
  const std::vector<double>& xs = grid;
  std::vector<double> ys(xs.size());
  if (m.op() == ConvOp::rect) {
    const auto& A = m.rect_left();
    const auto& B = m.rect_right();
    bool gauss_a = A.lsvd.has_closed_form() &&
                   (A.lsvd.kind() == DensityKind::quarter_circle || A.lsvd.kind() == DensityKind::gauss_rect_lsvd);
    bool gauss_b = B.lsvd.has_closed_form() &&
                   (B.lsvd.kind() == DensityKind::quarter_circle || B.lsvd.kind() == DensityKind::gauss_rect_lsvd);
    auto qof = [](const SpectralDensity& d) { return d.kind() == DensityKind::quarter_circle ? 1.0 : d.param(1); };
    if (gauss_a && gauss_b && qof(A.lsvd) == m.q() && qof(B.lsvd) == m.q()) {
      double s = std::hypot(A.lsvd.param(0), B.lsvd.param(0));
      SpectralDensity c = m.q() == 1.0 ? SpectralDensity::quarter_circle(s) : SpectralDensity::gauss_rect_lsvd(s, m.q());
      for (size_t i = 0; i < xs.size(); ++i) ys[i] = c(xs[i]);
      return ys;
    }
    if (m.q() != 1.0) throw Error("density_on_support: rectangular density needs q = 1 or Gaussian operands");
    Ensemble sa = sym_ensemble(A), sb = sym_ensemble(B);
    cplx w = cplx(xs.empty() ? 0.0 : xs.front(), 1.0);
    for (size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < 0) throw Error("density_on_support: singular values are nonnegative");
      w = cplx(xs[i], 1.0);
      auto g_at = [&](cplx z, cplx& ww) { return add_subordination(sa, sb, z, ww); };
      ys[i] = 2.0 * plemelj(g_at, xs[i], w);
    }
    return ys;
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    cplx w = cplx(xs[i], 1.0);
    if (m.op() == ConvOp::add) {
      auto g_at = [&](cplx z, cplx& ww) { return add_subordination(m.left(), m.right(), z, ww); };
      ys[i] = plemelj(g_at, xs[i], w);
    } else {
      auto g_at = [&](cplx z, cplx& ww) { return mul_subordination(m.left(), m.right(), z, ww); };
      ys[i] = plemelj(g_at, xs[i], w);
    }
  }
  return ys;
}

SpectralDensity density_on_support(const ConvolutionModel& m, const std::vector<double>& grid) {
  return SpectralDensity::tabulated(grid, density_values(m, grid));
}

}  // namespace ldrm
