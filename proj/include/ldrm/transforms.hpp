#pragma once

#include <complex>

#include "ldrm/numerics.hpp"
#include "ldrm/spectra.hpp"

namespace ldrm {

enum class Branch { principal, second };

/// Suprema of the domains of R, S-tilde and C-tilde (infinite when divergent).
struct TransformDomain {
  double r_A = kInf;
  double s_A = kInf;
  double c_A = kInf;
};

/// Principal Stieltjes transform g(z) for real z >= a+.
double stieltjes(const SpectralDensity& d, double z);
std::complex<double> stieltjes(const SpectralDensity& d, std::complex<double> z);
/// Second branch V'(x) - g(x); without V' only x = a+ is available.
double stieltjes_second(const Ensemble& e, double x);
double stieltjes_branch(const Ensemble& e, double x, Branch b);

double t_transform(const SpectralDensity& d, double z);
double t_second(const Ensemble& e, double x);

/// g_{AA^T}(z^2) for a singular-value density.
double square_stieltjes(const SpectralDensity& lsvd, double z);
double square_stieltjes_second(const RectEnsemble& r, double z);
double d_transform(const SpectralDensity& lsvd, double q, double z);
double d_second(const RectEnsemble& r, double x);

/// Continued inverses: principal branch for y up to the value at the edge,
/// second branch beyond it.
double stieltjes_inverse(const Ensemble& e, double y);
double t_inverse(const Ensemble& e, double y);
double d_inverse(const RectEnsemble& r, double y);

double r_transform(const Ensemble& e, double y);
double r_transform(const SpectralDensity& d, double y);
double s_transform(const Ensemble& e, double y);
double s_transform(const SpectralDensity& d, double y);
double c_transform(const RectEnsemble& r, double y);

TransformDomain domain(const Ensemble& e);
TransformDomain domain(const RectEnsemble& r);

/// Second-branch transform at the wall; a dirac with a wall above its atom is
/// read as a rank-one deformation and uses the principal value at the wall.
double gbar_at_wall(const Ensemble& e);
double tbar_at_wall(const Ensemble& e);
double dbar_at_wall(const RectEnsemble& r);

double u_func(double q, double y);
double u_inv(double q, double z);
double f_q(double q, double z);
/// (f_q(a) - f_q(b)) / q, evaluated without cancellation.
double f_q_diff_over_q(double q, double a, double b);

struct EdgeRecovery {
  double edge = 0.0;
  double value = 0.0;  // transform at the edge; infinite when no stationary point exists
};

/// Edge from the stationary point of a decreasing-then-increasing inverse on
/// (y_lo, y_hi). When the minimum sits at y_hi the value is y_hi, or infinite
/// when hi_unbounded is set.
EdgeRecovery edge_from_inverse(const RealFn& g_inv, double y_lo, double y_hi, bool hi_unbounded = false);

}  // namespace ldrm
