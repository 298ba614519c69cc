#include "ldrm/freenergy.hpp"

#include <cmath>

#include "ldrm/errors.hpp"

namespace ldrm {

namespace {

double annealed(ConvOp op, double q, const RealFn& lin, double wall, double tau, double theta) {
  if (!(theta > 0)) throw DomainExceeded("annealed free energy: theta must be positive");
  if (theta <= tau) {
    double l = lin(theta);
    switch (op) {
      case ConvOp::add: return 0.5 * l;
      case ConvOp::mul: return 0.5 * std::log(l);
      case ConvOp::rect: return l;
    }
  }
  if (std::isinf(wall)) return kInf;
  switch (op) {
    case ConvOp::add: return 0.5 * (wall - 1.0 / theta);
    case ConvOp::mul: return 0.5 * std::log(wall * theta / (theta + 1.0));
    case ConvOp::rect: return u_func(q, theta * wall) / theta;
  }
  return kInf;
}

double quenched(const ConvolutionModel& conv, double x, double theta) {
  if (!(theta > 0)) throw DomainExceeded("quenched free energy: theta must be positive");
  double h = conv.principal(x);
  if (theta <= h) {
    double l = conv.linearizer(theta);
    switch (conv.op()) {
      case ConvOp::add: return 0.5 * l;
      case ConvOp::mul: return 0.5 * std::log(l);
      case ConvOp::rect: return l;
    }
  }
  switch (conv.op()) {
    case ConvOp::add: return 0.5 * (x - 1.0 / theta);
    case ConvOp::mul: return 0.5 * std::log(x * theta / (theta + 1.0));
    case ConvOp::rect: return u_func(conv.q(), theta * x) / theta;
  }
  return 0.0;
}

double quenched_dx(const ConvolutionModel& conv, double x, double theta) {
  double h = conv.principal(x);
  if (theta <= h) return 0.0;
  switch (conv.op()) {
    case ConvOp::add: return 0.5 * (theta - h);
    case ConvOp::mul: return 0.5 * ((theta + 1.0) / x - conv.stieltjes(x));
    case ConvOp::rect: return f_q_diff_over_q(conv.q(), theta * x, h * x) / x;
  }
  return 0.0;
}

void require(const ConvolutionModel& conv, ConvOp op, const char* where) {
  if (conv.op() != op) throw Error(std::string(where) + ": wrong convolution type");
}

double wall_tau(const ConvolutionModel& conv, bool left) {
  switch (conv.op()) {
    case ConvOp::add: return gbar_at_wall(left ? conv.left() : conv.right());
    case ConvOp::mul: return tbar_at_wall(left ? conv.left() : conv.right());
    case ConvOp::rect: return dbar_at_wall(left ? conv.rect_left() : conv.rect_right());
  }
  return kInf;
}

double wall_of(const ConvolutionModel& conv, bool left) {
  if (conv.op() == ConvOp::rect) return left ? conv.rect_left().wall : conv.rect_right().wall;
  return left ? conv.left().wall : conv.right().wall;
}

}  // namespace

double TiltModel::lin_a(double y) const { return swapped ? conv.linearizer_right(y) : conv.linearizer_left(y); }
double TiltModel::lin_b(double y) const { return swapped ? conv.linearizer_left(y) : conv.linearizer_right(y); }

double TiltModel::annealed_a(double theta) const {
  return annealed(conv.op(), conv.q(), [this](double y) { return lin_a(y); }, w_a, tau_a, theta);
}

double TiltModel::annealed_b(double theta) const {
  return annealed(conv.op(), conv.q(), [this](double y) { return lin_b(y); }, w_b, tau_b, theta);
}

TiltModel make_tilt(const ConvolutionModel& conv, double x) {
  TiltModel m{conv};
  m.x = x;
  double tl = wall_tau(conv, true), tr = wall_tau(conv, false);
  // Ties (including two infinite values) keep the given order.
  m.swapped = tr < tl;
  m.tau_a = m.swapped ? tr : tl;
  m.tau_b = m.swapped ? tl : tr;
  m.w_a = wall_of(conv, !m.swapped);
  m.w_b = wall_of(conv, m.swapped);
  m.hard_bound = conv.op() == ConvOp::mul ? m.w_a * m.w_b : m.w_a + m.w_b;
  return m;
}

double ssk_quenched_dtheta(const ConvolutionModel& conv, double x, double theta) {
  require(conv, ConvOp::add, "ssk_quenched_dtheta");
  return quenched(conv, x, theta);
}

double ssk_quenched_dx(const ConvolutionModel& conv, double x, double theta) {
  require(conv, ConvOp::add, "ssk_quenched_dx");
  return quenched_dx(conv, x, theta);
}

double ssk_annealed_dtheta(const Ensemble& e, double theta) {
  return annealed(ConvOp::add, 1.0, [&e](double y) { return r_transform(e, y); }, e.wall, gbar_at_wall(e), theta);
}

double lssk_quenched_dtheta(const ConvolutionModel& conv, double x, double theta) {
  require(conv, ConvOp::mul, "lssk_quenched_dtheta");
  return quenched(conv, x, theta);
}

double lssk_quenched_dx(const ConvolutionModel& conv, double x, double theta) {
  require(conv, ConvOp::mul, "lssk_quenched_dx");
  return quenched_dx(conv, x, theta);
}

double lssk_annealed_dtheta(const Ensemble& e, double theta) {
  return annealed(ConvOp::mul, 1.0, [&e](double y) { return s_transform(e, y); }, e.wall, tbar_at_wall(e), theta);
}

double bssk_quenched_dtheta(const ConvolutionModel& conv, double x, double theta) {
  require(conv, ConvOp::rect, "bssk_quenched_dtheta");
  return quenched(conv, x, theta);
}

double bssk_quenched_dx(const ConvolutionModel& conv, double x, double theta) {
  require(conv, ConvOp::rect, "bssk_quenched_dx");
  return quenched_dx(conv, x, theta);
}

double bssk_annealed_dtheta(const RectEnsemble& r, double theta) {
  return annealed(ConvOp::rect, r.q, [&r](double y) { return c_transform(r, y); }, r.wall, dbar_at_wall(r), theta);
}

double tilt_diff(const TiltModel& m, double theta) {
  if (theta <= m.conv.principal(m.x)) return 0.0;
  double ann = m.annealed_a(theta);
  if (std::isinf(ann)) return -kInf;
  double bnn = m.annealed_b(theta);
  if (std::isinf(bnn)) return -kInf;
  return quenched(m.conv, m.x, theta) - ann - bnn;
}

}  // namespace ldrm
