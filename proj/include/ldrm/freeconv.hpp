#pragma once

#include <string>
#include <vector>

#include "ldrm/spectra.hpp"
#include "ldrm/transforms.hpp"

namespace ldrm {

enum class ConvOp { add, mul, rect };

/// Free convolution represented by its transforms. "h" denotes the
/// op-specific transform: g for add, t for mul, d for rect.
class ConvolutionModel {
 public:
  ConvOp op() const { return op_; }
  double q() const { return q_; }
  const Ensemble& left() const { return a_; }
  const Ensemble& right() const { return b_; }
  const RectEnsemble& rect_left() const { return ra_; }
  const RectEnsemble& rect_right() const { return rb_; }

  double c_plus() const { return c_plus_; }
  /// h_C(c+), infinite when the inverse has no stationary point.
  double h_at_edge() const { return h_edge_; }
  double y_max() const { return y_max_; }

  /// Continued inverse h_C^{-1}(y) on (0, y_max].
  double inverse(double y) const;
  /// R_C, S-tilde_C or C-tilde_C.
  double linearizer(double y) const;
  double linearizer_left(double y) const;
  double linearizer_right(double y) const;

  double principal(double x) const;
  double second(double x) const;
  double branch(double x, Branch b) const { return b == Branch::principal ? principal(x) : second(x); }

  /// g_C(x) for add/mul, g_{CC^T}(x^2) for rect.
  double stieltjes(double x) const;
  double stieltjes_second(double x) const;

  /// Op-specific transform at the edge of each operand (g_A(a+), t_A(a+), d_A(a+)).
  double h_left_at_edge() const;
  double h_right_at_edge() const;

  std::string describe() const;

  friend ConvolutionModel add_conv(const Ensemble& A, const Ensemble& B);
  friend ConvolutionModel mul_conv(const Ensemble& A, const Ensemble& B);
  friend ConvolutionModel rect_conv(const RectEnsemble& A, const RectEnsemble& B, double q);

 private:
  void build();

  ConvOp op_ = ConvOp::add;
  double q_ = 1.0;
  Ensemble a_, b_;
  RectEnsemble ra_, rb_;
  double c_plus_ = 0.0;
  double h_edge_ = 0.0;
  double y_max_ = kInf;
};

ConvolutionModel add_conv(const Ensemble& A, const Ensemble& B);
ConvolutionModel mul_conv(const Ensemble& A, const Ensemble& B);
ConvolutionModel rect_conv(const RectEnsemble& A, const RectEnsemble& B, double q);

/// Complex g_C(z), Im z != 0, by fixed-point iteration of the subordination
/// equations (add, mul).
std::complex<double> conv_stieltjes(const ConvolutionModel& m, std::complex<double> z);
/// Boundary value g_C(x + i0) on the real axis (add, mul).
std::complex<double> conv_stieltjes_axis(const ConvolutionModel& m, double x);

/// Density of the convolved spectrum at the grid points (eigenvalues for
/// add/mul, singular values for rect), by Plemelj continuation.
std::vector<double> density_values(const ConvolutionModel& m, const std::vector<double>& grid);
/// Same values as a tabulated density renormalised to mass 1.
SpectralDensity density_on_support(const ConvolutionModel& m, const std::vector<double>& grid);

}  // namespace ldrm
