#pragma once

#include <functional>
#include <limits>

namespace ldrm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using RealFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integral of f over [a, b]; a may exceed b.
double integrate(const RealFn& f, double a, double b, double tol = 1e-12);

/// Integral over [a, b] with t = a + u^2, for integrands behaving like sqrt(t - a).
double integrate_sqrt_left(const RealFn& f, double a, double b, double tol = 1e-12);

/// Integral over [a, b] of an integrand with a log or 1/sqrt singularity at b.
double integrate_singular_right(const RealFn& f, double a, double b, double tol = 1e-11);

/// Root of f on [lo, hi]; requires a sign change. Throws NonConvergence otherwise.
double find_root(const RealFn& f, double lo, double hi, const char* where);

/// Solve f(x) = target for monotone f on [lo, hi]; clamps to the nearer end when
/// target lies marginally outside the bracketed range.
double solve_monotone(const RealFn& f, double target, double lo, double hi, const char* where);

/// Minimiser of a unimodal f on [lo, hi], refined on the derivative when interior.
double argmin(const RealFn& f, double lo, double hi);

}  // namespace ldrm
