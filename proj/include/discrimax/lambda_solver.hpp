#pragma once

#include "discrimax/measure.hpp"
#include "discrimax/models.hpp"
#include "discrimax/quadrature.hpp"

namespace discrimax {

struct SolverConfig {
  double delta = 1e-8;        // smallest |lambda| searched away from zero
  double beta = 50.0;         // exponential tilt search bound
  int max_iter = 200;
  double pole_offset = 1e-10; // relative to the bracket width, at the singular end
  double quad_tol = 1e-13;    // adaptive fallback tolerance

  /// Throws DomainError on out-of-range values.
  void validate() const;
};

enum class LambdaStatus {
  Zero,      // means coincide, lambda = 0
  Root,      // interior root found
  Boundary,  // no sign change; lambda is the end of the bracket nearest the pole
};

struct LambdaSolution {
  double lambda = 0.0;
  Interval bracket{0.0, 0.0};
  double residual = 0.0;
  int evals = 0;
  LambdaStatus status = LambdaStatus::Zero;
  bool adaptive = false;  // refined with adaptive quadrature near the pole
  // 1 + lambda (y_edge - eta2) at the support edge nearest the pole (y_min for
  // lambda >= 0, y_max otherwise). Near the pole it is solved for directly and
  // keeps full relative precision, which lambda alone cannot provide.
  double gap = 1.0;
};

// Ratio tilt: f2*(y) = f1(y) / (1 + lambda (y - eta2)).
// lambda solves  integral f1 / (1 + lambda (y - eta2)) dy = 1,  equivalently
// h(lambda) = -integral (y - eta2) f1 / (1 + lambda (y - eta2)) dy = 0.
// h is increasing with h(0) = eta2 - E_f1[Y], so the root has the sign of
// E_f1[Y] - eta2. The true mean of f1 is used throughout.
// The residual reported is |integral f1/(1 + lambda (y - eta2)) dy - 1|.

/// Search interval for the ratio tilt: [delta, 1/(eta2 - y_min) - d'] when the
/// mean of f1 exceeds eta2, [-1/(y_max - eta2) + d', -delta] otherwise.
Interval lambda_a_bracket(Interval support, double mean1, double eta2, const SolverConfig& cfg);

/// Throws DomainError unless y_min < eta2 < y_max, NoBracket when the residual
/// keeps one sign on the search interval.
LambdaSolution solve_lambda_a(const DiscreteDensity& f1, double eta2, const SolverConfig& cfg = {});
LambdaSolution solve_lambda_a(const ConditionalDensity& f1, double eta2,
                              const SolverConfig& cfg = {});

/// Whether the fixed rule of d resolves 1/(1 + lambda (y - eta2)), i.e. the pole
/// is at least d.edge_resolution() (in z) beyond the support.
bool ratio_rule_resolves(const DiscreteDensity& d, double eta2, double lambda);
/// 1 + lambda (y_edge - eta2) computed from lambda; see LambdaSolution::gap.
double ratio_gap(Interval support, double eta2, double lambda);
/// Fixed-rule sums of 1/(1 + lambda u) and log(1 + lambda u) against d, u = y - eta2,
/// with 1 + lambda u formed as gap + lambda (y - y_edge).
double ratio_normalisation(const DiscreteDensity& d, double eta2, double lambda, double gap);
double ratio_log_mean(const DiscreteDensity& d, double eta2, double lambda, double gap);
/// Same with the gap computed from lambda.
double ratio_normalisation(const DiscreteDensity& d, double eta2, double lambda);
double ratio_log_mean(const DiscreteDensity& d, double eta2, double lambda);

/// h(lambda) above evaluated by adaptive quadrature.
double lambda_a_equation(const ConditionalDensity& f1, double eta2, double lambda, double tol);

// Exponential tilt: f1*(y) = f2(y) exp(-lambda y) / integral f2 exp(-lambda y) dy,
// with lambda chosen so that f1* has mean eta1. The tilted mean decreases in lambda.
// Normal f2 uses the closed form lambda = (eta2 - eta1) / v^2.
// The residual reported is |tilted mean - eta1|.

LambdaSolution solve_lambda_b(const DiscreteDensity& f2, double eta1, const SolverConfig& cfg = {});
LambdaSolution solve_lambda_b(const ConditionalDensity& f2, double eta1,
                              const SolverConfig& cfg = {});

/// Tilted mean of f2 at lambda, by adaptive quadrature.
double tilted_mean(const ConditionalDensity& f2, double lambda, double tol);

}  // namespace discrimax
