#pragma once

#include <vector>

#include "discrimax/criteria.hpp"
#include "discrimax/design.hpp"

namespace discrimax {

enum class Verdict { Optimal, NotOptimal };

const char* to_string(Verdict v);

struct SensitivityPoint {
  double x = 0.0;
  double psi = 0.0;
};

/// psi(x) = I(x, theta2*) - value, the derivative of the criterion towards a
/// point mass at x. A design is optimal iff psi <= 0 everywhere, with equality
/// on its support.
struct SensitivityReport {
  std::vector<SensitivityPoint> grid;
  double max_violation = 0.0;   // max psi over the grid and the polished local maxima
  double argmax_x = 0.0;
  std::vector<double> support_residuals;
  double weighted_residual_sum = 0.0;  // sum w_i psi(x_i)
  double tol = 0.0;                    // absolute tolerance used (relative tol x value)
  Verdict verdict = Verdict::NotOptimal;
  bool non_unique = false;             // theta2* not unique; verdict is then qualified
  CriterionReport criterion;
};

struct VerifyOptions {
  int grid_n = 2001;
  double tol = 1e-4;  // relative to the criterion value
  bool polish = true;
};

/// Computes theta2* on the design once, then psi on a uniform grid of the
/// design space, refined by golden section around every local grid maximum.
SensitivityReport verify(const Criterion& c, const Design& d, const VerifyOptions& opt = {});
/// Same, reusing an inner minimisation already done on d.
SensitivityReport verify(const Criterion& c, const Design& d, const CriterionReport& inner,
                         const VerifyOptions& opt = {});

/// value / (value + max(0, max_violation)), clamped to (0, 1]. DomainError unless value > 0.
double efficiency_bound(const SensitivityReport& report, double value);

/// Whether efficiency_bound is only a heuristic for this criterion (the KL-type ones).
bool efficiency_bound_is_heuristic(CriterionKind kind);

}  // namespace discrimax
