#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldrm/spectra.hpp"

namespace ldrm {

Eigen::MatrixXd sample_goe(int n, double sigma, std::uint64_t seed);
/// X X^T / M with X of size n x M, M = round(n / q), times scale.
Eigen::MatrixXd sample_wishart(int n, double q, std::uint64_t seed, double scale = 1.0);
/// n x m Gaussian matrix with entries of variance sigma^2 / m.
Eigen::MatrixXd sample_ginibre(int n, int m, double sigma, std::uint64_t seed);
Eigen::MatrixXd haar_orthogonal(int n, std::uint64_t seed);

/// Eigenvalues of a symmetric matrix in ascending order.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m);

/// Operand of a simulated model. Fixed operands use classical positions (or
/// i.i.d. draws) of `density`; random ones are resampled every realization.
struct McOperand {
  enum class Kind { fixed, goe, wishart, gauss_rect };
  Kind kind = Kind::fixed;
  SpectralDensity density = SpectralDensity::dirac(0.0);
  double sigma = 1.0;  // GOE / gauss_rect scale; Wishart scale
  double q = 1.0;
};

enum class McModel { single, sum, product, rect_sum, spike_add, spike_mul, rk1rk1 };

struct McConfig {
  McModel model = McModel::single;
  int n = 64;
  long samples = 100;
  std::uint64_t seed = 1;
  McOperand a;
  McOperand b;
  double gamma = 1.0;        // spike strength
  double q = 1.0;            // shape ratio of rectangular models
  double w_a = 2.0, w_b = 1.0;  // rk1rk1
  bool iid_diagonal = false;
  int bins = 40;
  std::string label;
};

struct RatePoint {
  double x = 0.0;
  long hits = 0;
  double rate = 0.0;
  double stderr_rate = 0.0;
  bool flagged = false;
};

struct McReport {
  std::string config;  // JSON echo of the configuration
  std::uint64_t seed = 0;
  long samples = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
  std::vector<double> quantiles;  // at 0.05, 0.25, 0.5, 0.75, 0.95
  std::vector<double> bin_edges;
  std::vector<long> bin_counts;
  std::vector<RatePoint> rates;
  double sup_cdf = -1.0;  // spectral CDF distance, negative when not computed
  double wall_seconds = -1.0;  // serialized only when non-negative

  std::string to_json() const;
};

/// Deterministic per-sample seed from the master seed and a counter.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

/// Top eigenvalue (or singular value for rectangular models) of every sample.
std::vector<double> sample_tops(const McConfig& cfg);
/// Full spectrum (eigenvalues, or singular values) of one sample.
std::vector<double> sample_spectrum(const McConfig& cfg, std::uint64_t counter);

McReport sample_model_top(const McConfig& cfg);
/// Throws InsufficientTail when every requested x has fewer than 10 hits.
McReport empirical_rate(const McConfig& cfg, const std::vector<double>& x_grid);
/// Pools `cfg.samples` spectra and compares them with the predicted density.
McReport histogram_vs_density(const McConfig& cfg, const SpectralDensity& predicted);

std::string config_json(const McConfig& cfg);

}  // namespace ldrm
