#pragma once

#include <functional>
#include <span>
#include <vector>

namespace discrimax {

struct NelderMeadOptions {
  double initial_step = 0.1;  // simplex edge, in unit-box coordinates
  double xtol = 1e-9;         // simplex diameter, in unit-box coordinates
  double ftol_rel = 1e-12;    // spread of vertex values relative to the best value
  double ftol_abs = 0.0;
  int max_evals = 5000;
  int restarts = 1;           // fresh simplices around the converged point
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex descent on the box [lo, hi]. The search runs in
/// coordinates scaled to the unit cube; trial points are projected onto the box.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0,
                             std::span<const double> lo, std::span<const double> hi,
                             const NelderMeadOptions& opt = {});

}  // namespace discrimax
