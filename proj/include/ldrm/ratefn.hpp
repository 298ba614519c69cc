#pragma once

#include <functional>
#include <memory>

#include "ldrm/freenergy.hpp"

namespace ldrm {

/// Right rate function of the top eigenvalue (or singular value) of a
/// convolution. Regime 1 covers [c+, x_c1], regime 2 [x_c1, x_c2], regime 3
/// [x_c2, hard_bound). When the smaller wall transform lies below h_C(c+) (a
/// rank-one operand above its threshold) the curve vanishes at `typical`
/// rather than at c+, and regime 2 extends down to c+.
struct RateCurve {
  ConvOp op = ConvOp::add;
  double c_plus = 0.0;
  double typical = 0.0;
  double x_c1 = kInf;
  double x_c2 = kInf;
  double hard_bound = kInf;
  double K1 = 0.0;
  double K2 = 0.0;
  bool infinite = false;

  std::function<double(double)> eval;
  std::function<double(double)> theta_star;
  /// Derivative of the rate from the quenched dx-derivative at theta*.
  std::function<double(double)> slope;

  /// 1, 2 or 3 for x in [c+, hard_bound); 0 outside.
  int regime(double x) const;
  double operator()(double x) const { return eval(x); }
};

/// Half the area between the two branches of g, from a+ to x.
double psi_one_matrix(const Ensemble& e, double x);
/// Psi of the squared singular values, via the modified potential.
double phi_one_rect(const RectEnsemble& re, double x);
/// Same quantity through the rectangular convolution with a null matrix.
double phi_one_rect_conv(const RectEnsemble& re, double x);

RateCurve rate_sum(const ConvolutionModel& conv);
RateCurve rate_prod(const ConvolutionModel& conv);
RateCurve rate_rect(const ConvolutionModel& conv);
/// Dispatches on the convolution type.
RateCurve rate_curve(const ConvolutionModel& conv);

std::function<double(double)> theta_star_sum(const ConvolutionModel& conv);
std::function<double(double)> theta_star_prod(const ConvolutionModel& conv);
std::function<double(double)> theta_star_rect(const ConvolutionModel& conv);

/// V(x) with V(c+) = 0, from V'(x)/2 = Pi'(x) + g_C(x); on the support the
/// real part of g_C is used (add and mul only).
double effective_potential(const RateCurve& curve, const ConvolutionModel& conv, double x);

struct ScalingFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  /// (2/3) gamma0^{3/2}.
  double expected_coefficient = 0.0;
};

/// Log-log fit of Pi(c+ + eps) for eps in [1e-6, 1e-3].
ScalingFit tw_scaling_check(const RateCurve& curve, double gamma0);

}  // namespace ldrm
