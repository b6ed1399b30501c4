#pragma once

#include <span>
#include <vector>

#include "discrimax/expr.hpp"
#include "discrimax/quadrature.hpp"

namespace discrimax {

double normal_pdf(double z);
double normal_cdf(double z);

/// Inverse of the standard normal CDF: rational approximation followed by one
/// Newton step on the CDF. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// A mean function together with the box its parameters range over.
/// The box may be empty for a model whose parameters are fixed.
struct ModelSpec {
  MeanExpr mean;
  int theta_dim = 0;
  std::vector<Interval> theta_box;

  /// Validates the box against the expression's arity (ConfigError on mismatch).
  static ModelSpec make(MeanExpr mean, std::vector<Interval> box = {});

  double eta(double x, std::span<const double> theta) const { return mean.eval(x, theta); }
  bool in_box(std::span<const double> theta) const;
};

enum class DensityKind { TruncatedNormal, TruncatedLognormal, Normal, Lognormal };

const char* to_string(DensityKind kind);

/// A conditional density family f(y, x, theta) parametrised by its mean eta(x, theta)
/// and a variance function v^2(x, theta).
///
/// TruncatedNormal: N(eta, v^2) restricted to [eta - a, eta + a], so its mean is eta.
/// TruncatedLognormal: the lognormal with mean eta and variance v^2 restricted to
///   [Q(p_lo), Q(p_hi)]; eta is only its nominal mean.
/// Normal, Lognormal: untruncated, used through closed forms only.
class DensityFamily {
 public:
  static DensityFamily truncated_normal(MeanExpr variance, double half_width);
  static DensityFamily truncated_lognormal(MeanExpr variance, double p_lo, double p_hi);
  static DensityFamily normal(MeanExpr variance);
  static DensityFamily lognormal(MeanExpr variance);

  DensityKind kind() const { return kind_; }
  const MeanExpr& variance_expr() const { return variance_; }
  double half_width() const { return half_width_; }
  double p_lo() const { return p_lo_; }
  double p_hi() const { return p_hi_; }
  double z_lo() const { return z_lo_; }
  double z_hi() const { return z_hi_; }
  bool bounded() const {
    return kind_ == DensityKind::TruncatedNormal || kind_ == DensityKind::TruncatedLognormal;
  }

  /// v^2(x, theta); throws InvalidVariance unless finite and positive.
  double variance(double x, std::span<const double> theta) const;

 private:
  DensityKind kind_ = DensityKind::Normal;
  MeanExpr variance_;
  double half_width_ = 0.0;
  double p_lo_ = 0.0;
  double p_hi_ = 1.0;
  double z_lo_ = 0.0;
  double z_hi_ = 0.0;
};

/// The density y -> f(y, x, theta) for one fixed (x, theta).
class ConditionalDensity {
 public:
  ConditionalDensity(const DensityFamily& family, double x, std::span<const double> theta,
                     const MeanExpr& mean);
  /// Same density built directly from its nominal mean and variance.
  ConditionalDensity(const DensityFamily& family, double eta, double variance);

  /// Density value; zero outside the support.
  double operator()(double y) const;

  DensityKind kind() const { return kind_; }
  double eta() const { return eta_; }
  double variance() const { return variance_; }
  bool bounded() const { return bounded_; }
  /// Throws UnboundedSupport for the untruncated kinds.
  Interval support() const;
  /// The actual mean; equals eta() except for TruncatedLognormal.
  double mean() const { return mean_; }
  /// Location and scale of log(Y) for the lognormal kinds, of Y for the normal kinds.
  double location() const { return location_; }
  double scale() const { return scale_; }

  /// Log of the density; -inf outside the support.
  double log_pdf(double y) const;

  // Standardised coordinate z: y = location + scale*z (normal kinds) or
  // y = exp(location + scale*z) (lognormal kinds). In z the density is
  // normal_pdf(z) * mass_factor() on z_range(), which keeps quadrature nodes
  // where the probability mass is.
  double y_of_z(double z) const;
  double z_of_y(double y) const;
  /// Truncation range in z; clipped to +-38 where the normal tail underflows.
  Interval z_range() const { return z_range_; }
  double mass_factor() const { return norm_; }

 private:
  void init(const DensityFamily& family);

  DensityKind kind_;
  double eta_;
  double variance_;
  bool bounded_ = false;
  Interval support_{};
  double mean_ = 0.0;
  double location_ = 0.0;
  double scale_ = 1.0;
  double norm_ = 1.0;  // reciprocal of the truncated probability mass
  Interval z_range_{-38.0, 38.0};
};

/// f(y, x, theta). Throws OutOfSupport when y lies outside the support.
double density(const DensityFamily& family, double y, double x, std::span<const double> theta,
               const MeanExpr& mean);

/// Support of f(., x, theta); UnboundedSupport for the untruncated kinds.
Interval support(const DensityFamily& family, double x, std::span<const double> theta,
                 const MeanExpr& mean);

/// Uniform candidate grid on a design interval, endpoints included.
struct DesignSpace {
  Interval domain;
  int grid_n = 401;

  std::vector<double> grid() const;
};

}  // namespace discrimax
