#pragma once

#include <string>
#include <vector>

#include "ldrm/mcvalidate.hpp"
#include "ldrm/spectra.hpp"

namespace ldrm::cli {

/// Parsed `kind:param[:param]:wall` descriptor.
struct Descriptor {
  std::string kind;  // sc, mp, qc, gaussrect, dirac, tab
  std::vector<double> params;
  std::string path;  // tab only
  double wall = kInf;
  bool wall_at_edge = false;
};

Descriptor parse_descriptor(const std::string& text);
Ensemble to_ensemble(const Descriptor& d);
RectEnsemble to_rect(const Descriptor& d, double q);
/// Monte Carlo operand: walls at the edge become fixed diagonals.
McOperand to_operand(const Descriptor& d);

struct Grid {
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  std::vector<double> points() const;
};

Grid parse_grid(const std::string& text);

/// Entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace ldrm::cli
