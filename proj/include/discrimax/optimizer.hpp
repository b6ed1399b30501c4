#pragma once

#include <string>
#include <vector>

#include "discrimax/criteria.hpp"
#include "discrimax/design.hpp"

namespace discrimax {

struct OptimizerConfig {
  int grid_n = 401;              // candidate grid for the first-order step
  int max_outer_iters = 500;
  double stop_tol = 1e-5;        // max sensitivity relative to the criterion value
  double merge_tol_rel = 1e-3;   // relative to the design-space width
  double weight_floor = 1e-4;
  int consolidate_every = 25;
  double refine_tol = 1e-10;     // weight refinement: spread of support divergences / value
  int stall_iters = 50;
  double stall_tol = 1e-14;
  bool polish = true;            // golden-section polish of support points

  /// Throws ConfigError on nonpositive entries or grid_n < 2.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double value = 0.0;
  std::vector<double> theta2;
  double added_point = 0.0;
  double gamma = 0.0;            // accepted step (0 if every trial step was rejected)
  double max_sensitivity = 0.0;  // over the candidate grid, before the step
  std::string event;             // "step", "consolidate" or "final"
};

struct OptimizerTrace {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  bool stall_warning = false;
  double max_sensitivity = 0.0;
  std::string notes;
};

struct OptimizerResult {
  Design design;
  CriterionReport report;
  OptimizerTrace trace;
};

/// First-order design algorithm: step mass 1/(k+1) towards the grid maximiser of
/// the point divergence at the current minimising theta2 (halved until the
/// criterion does not decrease). Every consolidate_every iterations the support
/// is merged, pruned, moved to local maxima of the sensitivity and reweighted.
/// Stops once max sensitivity <= stop_tol * value.
OptimizerResult solve_design(const Criterion& c, const OptimizerConfig& cfg = {},
                             const Design* initial = nullptr);

struct RefineOptions {
  double tol = 1e-10;
  double weight_floor = 1e-4;
  int max_iter = 500;
};

/// Weights maximising the criterion on the support of `start`. With m + 1
/// support points (m = dim theta2) the equaliser conditions are solved
/// directly; otherwise projected gradient ascent on the simplex. Points whose
/// weight falls below the floor are dropped.
Design refine_weights(const Criterion& c, const Design& start, const RefineOptions& opt = {},
                      const std::vector<double>* warm = nullptr);
Design refine_weights(const Criterion& c, const std::vector<double>& support,
                      const RefineOptions& opt = {});

/// First grid index whose value is within 1e-12 of the maximum.
std::size_t argmax_smallest(const std::vector<double>& values);

}  // namespace discrimax
