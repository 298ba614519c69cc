#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldrm/numerics.hpp"

namespace ldrm {

enum class DensityKind { semicircle, marchenko_pastur, quarter_circle, gauss_rect_lsvd, dirac, tabulated };

struct SupportInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct Atom {
  double position = 0.0;
  double mass = 0.0;
};

/// Probability density on a compact interval. Closed-form kinds carry their
/// parameters; tabulated densities interpolate linearly and may carry atoms.
class SpectralDensity {
 public:
  static SpectralDensity semicircle(double sigma);
  /// Marchenko-Pastur law of ratio q in (0, 1], scaled by `scale`.
  static SpectralDensity marchenko_pastur(double q, double scale = 1.0);
  static SpectralDensity quarter_circle(double sigma);
  static SpectralDensity gauss_rect_lsvd(double sigma, double q);
  static SpectralDensity dirac(double a);
  /// Grid must be ascending; the interpolant is renormalised so that the
  /// continuous part carries 1 - (sum of atom masses).
  static SpectralDensity tabulated(std::vector<double> grid, std::vector<double> values,
                                   std::vector<Atom> atoms = {});
  /// Samples f on a Chebyshev grid of the given support.
  static SpectralDensity tabulate(const RealFn& f, SupportInterval support, int nodes = 512);

  DensityKind kind() const { return kind_; }
  const SupportInterval& support() const { return support_; }
  double lower() const { return support_.lower; }
  double upper() const { return support_.upper; }
  double param(int i) const { return params_[i]; }
  std::optional<double> edge_coeff() const { return edge_coeff_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// True when transforms must be computed by quadrature and root solving,
  /// even for closed-form kinds.
  bool numeric() const { return numeric_; }
  SpectralDensity as_numeric() const;
  bool has_closed_form() const { return !numeric_ && kind_ != DensityKind::tabulated; }

  double operator()(double x) const;
  /// Integral of f against the density (atoms included).
  double expect(const RealFn& f, double tol = 1e-13) const;
  double mean() const;
  double cdf(double x) const;
  std::string describe() const;

 private:
  DensityKind kind_ = DensityKind::dirac;
  double params_[2] = {0.0, 0.0};
  SupportInterval support_;
  std::optional<double> edge_coeff_;
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<Atom> atoms_;
  bool numeric_ = false;
};

double eval_density(const SpectralDensity& d, double x);

/// Quantiles at levels i/(n+1), i = 1..n.
std::vector<double> classical_positions(const SpectralDensity& d, int n);

/// (rho(x) + rho(-x)) / 2 for a density on the nonnegative half-line.
SpectralDensity symmetrize(const SpectralDensity& rho);

/// Law of s^2 when s has density rho: rho(sqrt(l)) / (2 sqrt(l)).
SpectralDensity lsvd_to_square(const SpectralDensity& rho);

/// Square-root edge coefficient gamma0, fitted on density(a+ - eps) for eps in [1e-6, 1e-3]
/// when no closed form is stored.
double edge_coefficient(const SpectralDensity& d);

SpectralDensity load_density_csv(const std::string& path);
void save_density_csv(const SpectralDensity& d, const std::string& path, int nodes = 512);

/// Invariant ensemble: density, potential derivative V' and wall w >= a+.
struct Ensemble {
  SpectralDensity density;
  RealFn v_prime;    // empty when unknown
  RealFn potential;  // V itself, used only by the Coulomb-gas sampler
  double wall = kInf;
};

Ensemble goe(double sigma, double wall = kInf);
Ensemble wishart(double q, double wall = kInf, double scale = 1.0);
/// Fixed diagonal matrix with the given spectrum: wall at the edge, no potential.
Ensemble fixed_diagonal(const SpectralDensity& d);
/// Rank-one matrix gamma vv^T seen as dirac(base) with a wall at base + gamma.
Ensemble rank_one(double gamma, double base = 0.0);
Ensemble with_wall(Ensemble e, double wall);

/// Bi-invariant rectangular ensemble described by its singular-value density.
/// v_prime_tilde acts on squared singular values.
struct RectEnsemble {
  SpectralDensity lsvd;
  double q = 1.0;
  RealFn v_prime_tilde;
  double wall = kInf;
};

RectEnsemble gauss_rect(double sigma, double q, double wall = kInf);
RectEnsemble ginibre(double sigma, double wall = kInf);
RectEnsemble fixed_rect(const SpectralDensity& lsvd, double q);

struct EigenConfiguration {
  std::vector<double> values;
  double wall = kInf;
};

/// Metropolis chain for the joint eigenvalue law of an invariant ensemble with
/// a wall; single-particle Gaussian moves, returns the final configuration.
EigenConfiguration metropolis_wall_sample(const Ensemble& e, int n, int steps, std::uint64_t seed);

}  // namespace ldrm
