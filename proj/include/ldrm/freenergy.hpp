#pragma once

#include "ldrm/freeconv.hpp"

namespace ldrm {

/// Convolution with its operands sorted by the transform at the wall, so that
/// tau_a <= tau_b. tau is g-bar, t-bar or d-bar at the wall depending on the op.
struct TiltModel {
  ConvolutionModel conv;
  double x = 0.0;
  bool swapped = false;
  double w_a = kInf, w_b = kInf;
  double tau_a = kInf, tau_b = kInf;
  double hard_bound = kInf;

  /// Linearizer (R, S-tilde or C-tilde) of the sorted operands.
  double lin_a(double y) const;
  double lin_b(double y) const;
  /// Derivative of the annealed free energy of each sorted operand.
  double annealed_a(double theta) const;
  double annealed_b(double theta) const;
};

TiltModel make_tilt(const ConvolutionModel& conv, double x = 0.0);

double ssk_quenched_dtheta(const ConvolutionModel& conv, double x, double theta);
double ssk_quenched_dx(const ConvolutionModel& conv, double x, double theta);
double ssk_annealed_dtheta(const Ensemble& e, double theta);

double lssk_quenched_dtheta(const ConvolutionModel& conv, double x, double theta);
double lssk_quenched_dx(const ConvolutionModel& conv, double x, double theta);
double lssk_annealed_dtheta(const Ensemble& e, double theta);

double bssk_quenched_dtheta(const ConvolutionModel& conv, double x, double theta);
double bssk_quenched_dx(const ConvolutionModel& conv, double x, double theta);
double bssk_annealed_dtheta(const RectEnsemble& r, double theta);

/// Quenched minus annealed theta-derivative at model.x; exactly 0 for
/// theta <= h_C(x), -infinity where an annealed term diverges.
double tilt_diff(const TiltModel& model, double theta);

}  // namespace ldrm
