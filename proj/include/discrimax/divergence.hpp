#pragma once

#include <cmath>

#include "discrimax/lambda_solver.hpp"
#include "discrimax/measure.hpp"
#include "discrimax/models.hpp"

namespace discrimax {

enum class PointStatus {
  Ok,
  Boundary,    // no interior root; value is the dual bound at the bracket end
  Infeasible,  // the prescribed mean lies outside the support; value is +inf
};

const char* to_string(PointStatus s);

struct PointDivergence {
  double x = 0.0;
  double value = 0.0;
  LambdaSolution lambda;
  double eta1 = 0.0;
  double eta2 = 0.0;
  PointStatus status = PointStatus::Ok;
};

/// KL(f1 || f2) = integral f1 log(f1/f2) dy, natural log.
/// Closed forms for two normal or two untruncated lognormal densities, quadrature
/// over the support of f1 otherwise. SupportMismatch unless supp f1 lies in supp f2.
double kl_point(const ConditionalDensity& f1, const ConditionalDensity& f2, double tol = 1e-10);

/// Smallest KL(f1 || g) over densities g on the support of f1 with mean eta2:
/// integral log(1 + lambda (y - eta2)) f1 dy at the ratio-tilt root.
PointDivergence skl_a_point(const DiscreteDensity& f1, double eta2, const SolverConfig& cfg = {});
PointDivergence skl_a_point(const ConditionalDensity& f1, double eta2,
                            const SolverConfig& cfg = {});

/// Smallest KL(g || f2) over densities g with mean eta1:
/// -log integral f2 exp(-lambda (y - eta1)) dy at the exponential-tilt root.
/// Normal f2 gives (eta1 - eta2)^2 / (2 v^2).
PointDivergence skl_b_point(const DiscreteDensity& f2, double eta1, const SolverConfig& cfg = {});
PointDivergence skl_b_point(const ConditionalDensity& f2, double eta1,
                            const SolverConfig& cfg = {});

/// The least favourable f2* = f1 / (1 + lambda (y - eta2)). The denominator is
/// formed as gap + lambda (y - y_edge), see LambdaSolution::gap.
class RatioTiltedDensity {
 public:
  RatioTiltedDensity(ConditionalDensity f1, double eta2, double lambda, double gap)
      : f1_(f1), eta2_(eta2), lambda_(lambda), gap_(gap),
        edge_(lambda >= 0.0 ? f1.support().lo : f1.support().hi) {}
  RatioTiltedDensity(ConditionalDensity f1, double eta2, double lambda)
      : RatioTiltedDensity(f1, eta2, lambda, ratio_gap(f1.support(), eta2, lambda)) {}
  double operator()(double y) const { return f1_(y) / (gap_ + lambda_ * (y - edge_)); }
  Interval support() const { return f1_.support(); }
  const ConditionalDensity& base() const { return f1_; }
  double eta2() const { return eta2_; }
  double lambda() const { return lambda_; }
  double gap() const { return gap_; }

 private:
  ConditionalDensity f1_;
  double eta2_;
  double lambda_;
  double gap_;
  double edge_;
};

/// The least favourable f1* = f2 exp(-lambda y) / integral f2 exp(-lambda y) dy.
class ExpTiltedDensity {
 public:
  ExpTiltedDensity(ConditionalDensity f2, double eta1, double lambda, double log_norm)
      : f2_(f2), eta1_(eta1), lambda_(lambda), log_norm_(log_norm) {}
  double operator()(double y) const {
    const double lp = f2_.log_pdf(y);
    return std::isfinite(lp) ? std::exp(lp - lambda_ * (y - eta1_) - log_norm_) : 0.0;
  }
  const ConditionalDensity& base() const { return f2_; }
  double lambda() const { return lambda_; }

 private:
  ConditionalDensity f2_;
  double eta1_;
  double lambda_;
  double log_norm_;  // log integral f2 exp(-lambda (y - eta1)) dy
};

RatioTiltedDensity optimal_f2(const ConditionalDensity& f1, double eta2,
                              const SolverConfig& cfg = {});
ExpTiltedDensity optimal_f1(const ConditionalDensity& f2, double eta1,
                            const SolverConfig& cfg = {});

}  // namespace discrimax
