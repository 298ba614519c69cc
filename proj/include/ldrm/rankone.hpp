#pragma once

#include <cstdint>
#include <vector>

#include "ldrm/ratefn.hpp"

namespace ldrm {

/// Base ensemble B deformed by a rank-one perturbation of strength gamma:
/// B + gamma vv^T (add) or (1 + gamma vv^T)^{1/2} B (1 + gamma vv^T)^{1/2} (mul).
struct SpikeModel {
  Ensemble base;
  double gamma = 0.0;
  ConvOp op = ConvOp::add;
  double threshold = 0.0;
  double typical_top = 0.0;
};

SpikeModel make_spike(const Ensemble& base, double gamma, ConvOp op);

/// Typical top eigenvalue: b+ below the threshold, the outlier above it.
double bbp_top(const SpikeModel& m);

/// Rate curve of the spiked model, built from the rank-one pseudo-ensemble.
RateCurve rankone_curve(const SpikeModel& m);
double rate_rankone_add(const SpikeModel& m, double x);
double rate_rankone_mul(const SpikeModel& m, double x);

/// Typical top singular value of a rectangular spike; no rate is provided.
double bbp_rect_threshold(const RectEnsemble& re, double gamma);

/// w_A e e^T + w_B v v^T with v uniform on the sphere, w_A >= w_B.
struct Rk1PlusRk1 {
  double w_a = 2.0;
  double w_b = 1.0;
};

/// Exact law of the top eigenvalue at size n.
double rk1rk1_density(const Rk1PlusRk1& m, int n, double lambda);
/// Exact tail probability P[lambda_1 >= x] at size n.
double rk1rk1_tail(const Rk1PlusRk1& m, int n, double x);
/// Large-n rate -(1/2) log(x (w_A + w_B - x) / (w_A w_B)).
double rk1rk1_rate(const Rk1PlusRk1& m, double x);
std::vector<double> rk1rk1_sample(const Rk1PlusRk1& m, int n, long count, std::uint64_t seed);

}  // namespace ldrm
