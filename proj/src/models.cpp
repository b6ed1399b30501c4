#include "discrimax/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(fmt::format("normal_quantile: p={} outside (0,1)", p));
  // Acklam's rational approximation (relative error below 1.2e-9).
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double z;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Newton step; the residual is taken in the tail that avoids cancellation.
  const double dens = normal_pdf(z);
  if (dens > 0.0) {
    const double resid = p < 0.5 ? normal_cdf(z) - p : (1.0 - p) - normal_cdf(-z);
    z -= resid / dens;
  }
  return z;
}

ModelSpec ModelSpec::make(MeanExpr mean, std::vector<Interval> box) {
  ModelSpec m;
  m.theta_dim = mean.arity();
  m.mean = std::move(mean);
  if (!box.empty() && static_cast<int>(box.size()) != m.theta_dim) {
    throw ConfigError(fmt::format("parameter box has {} coordinates but the mean uses {}",
                                  box.size(), m.theta_dim));
  }
  for (std::size_t j = 0; j < box.size(); ++j) {
    if (!box[j].valid()) {
      throw ConfigError(fmt::format("parameter box coordinate p{} needs finite lo < hi", j + 1));
    }
  }
  m.theta_box = std::move(box);
  return m;
}

bool ModelSpec::in_box(std::span<const double> theta) const {
  if (theta_box.empty()) return true;
  for (std::size_t j = 0; j < theta_box.size(); ++j) {
    if (!theta_box[j].contains(theta[j])) return false;
  }
  return true;
}

const char* to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::TruncatedNormal: return "truncated_normal";
    case DensityKind::TruncatedLognormal: return "truncated_lognormal";
    case DensityKind::Normal: return "normal";
    case DensityKind::Lognormal: return "lognormal";
  }
  return "?";
}

DensityFamily DensityFamily::truncated_normal(MeanExpr variance, double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw DomainError("truncated normal half-width must be positive and finite");
  }
  DensityFamily f;
  f.kind_ = DensityKind::TruncatedNormal;
  f.variance_ = std::move(variance);
  f.half_width_ = half_width;
  return f;
}

DensityFamily DensityFamily::truncated_lognormal(MeanExpr variance, double p_lo, double p_hi) {
  if (!(p_lo > 0.0 && p_lo < p_hi && p_hi < 1.0)) {
    throw DomainError("truncated lognormal quantiles need 0 < p_lo < p_hi < 1");
  }
  DensityFamily f;
  f.kind_ = DensityKind::TruncatedLognormal;
  f.variance_ = std::move(variance);
  f.p_lo_ = p_lo;
  f.p_hi_ = p_hi;
  f.z_lo_ = normal_quantile(p_lo);
  f.z_hi_ = normal_quantile(p_hi);
  return f;
}

DensityFamily DensityFamily::normal(MeanExpr variance) {
  DensityFamily f;
  f.kind_ = DensityKind::Normal;
  f.variance_ = std::move(variance);
  return f;
}

DensityFamily DensityFamily::lognormal(MeanExpr variance) {
  DensityFamily f;
  f.kind_ = DensityKind::Lognormal;
  f.variance_ = std::move(variance);
  return f;
}

double DensityFamily::variance(double x, std::span<const double> theta) const {
  const double v = variance_.eval(x, theta);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidVariance(fmt::format("variance {} at x={} is not positive", v, x));
  }
  return v;
}

ConditionalDensity::ConditionalDensity(const DensityFamily& family, double x,
                                       std::span<const double> theta, const MeanExpr& mean)
    : kind_(family.kind()), eta_(mean.eval(x, theta)), variance_(family.variance(x, theta)) {
  init(family);
}

ConditionalDensity::ConditionalDensity(const DensityFamily& family, double eta, double variance)
    : kind_(family.kind()), eta_(eta), variance_(variance) {
  if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
    throw InvalidVariance(fmt::format("variance {} is not positive", variance_));
  }
  init(family);
}

void ConditionalDensity::init(const DensityFamily& family) {
  if (!std::isfinite(eta_)) throw DomainError("mean function is not finite");
  switch (kind_) {
    case DensityKind::Normal:
    case DensityKind::TruncatedNormal: {
      location_ = eta_;
      scale_ = std::sqrt(variance_);
      mean_ = eta_;
      if (kind_ == DensityKind::TruncatedNormal) {
        const double a = family.half_width();
        bounded_ = true;
        support_ = {eta_ - a, eta_ + a};
        norm_ = 1.0 / std::erf(a / (scale_ * std::numbers::sqrt2));
        z_range_ = {std::max(-a / scale_, -38.0), std::min(a / scale_, 38.0)};
      }
      break;
    }
    case DensityKind::Lognormal:
    case DensityKind::TruncatedLognormal: {
      if (!(eta_ > 0.0)) {
        throw DomainError(fmt::format("lognormal mean {} is not positive", eta_));
      }
      const double s2 = std::log1p(variance_ / (eta_ * eta_));
      location_ = std::log(eta_) - 0.5 * s2;
      scale_ = std::sqrt(s2);
      mean_ = eta_;
      if (kind_ == DensityKind::TruncatedLognormal) {
        bounded_ = true;
        support_ = {std::exp(location_ + scale_ * family.z_lo()),
                    std::exp(location_ + scale_ * family.z_hi())};
        const double mass = normal_cdf(family.z_hi()) - normal_cdf(family.z_lo());
        norm_ = 1.0 / mass;
        z_range_ = {family.z_lo(), family.z_hi()};
        mean_ = eta_ * (normal_cdf(family.z_hi() - scale_) - normal_cdf(family.z_lo() - scale_)) /
                mass;
      }
      break;
    }
  }
}

double ConditionalDensity::operator()(double y) const {
  if (bounded_ && !(y >= support_.lo && y <= support_.hi)) return 0.0;
  switch (kind_) {
    case DensityKind::Normal:
    case DensityKind::TruncatedNormal:
      return norm_ * normal_pdf((y - location_) / scale_) / scale_;
    case DensityKind::Lognormal:
    case DensityKind::TruncatedLognormal:
      if (!(y > 0.0)) return 0.0;
      return norm_ * normal_pdf((std::log(y) - location_) / scale_) / (y * scale_);
  }
  return 0.0;
}

double ConditionalDensity::log_pdf(double y) const {
  constexpr double log_sqrt_2pi = 0.91893853320467274178;
  if (bounded_ && !(y >= support_.lo && y <= support_.hi)) return -HUGE_VAL;
  switch (kind_) {
    case DensityKind::Normal:
    case DensityKind::TruncatedNormal: {
      const double z = (y - location_) / scale_;
      return std::log(norm_ / scale_) - log_sqrt_2pi - 0.5 * z * z;
    }
    case DensityKind::Lognormal:
    case DensityKind::TruncatedLognormal: {
      if (!(y > 0.0)) return -HUGE_VAL;
      const double ly = std::log(y);
      const double z = (ly - location_) / scale_;
      return std::log(norm_ / scale_) - ly - log_sqrt_2pi - 0.5 * z * z;
    }
  }
  return -HUGE_VAL;
}

double ConditionalDensity::y_of_z(double z) const {
  const double t = location_ + scale_ * z;
  return (kind_ == DensityKind::Lognormal || kind_ == DensityKind::TruncatedLognormal)
             ? std::exp(t)
             : t;
}

double ConditionalDensity::z_of_y(double y) const {
  if (kind_ == DensityKind::Lognormal || kind_ == DensityKind::TruncatedLognormal) {
    return y > 0.0 ? (std::log(y) - location_) / scale_ : -HUGE_VAL;
  }
  return (y - location_) / scale_;
}

Interval ConditionalDensity::support() const {
  if (!bounded_) {
    throw UnboundedSupport(fmt::format("{} density has unbounded support", to_string(kind_)));
  }
  return support_;
}

double density(const DensityFamily& family, double y, double x, std::span<const double> theta,
               const MeanExpr& mean) {
  const ConditionalDensity f(family, x, theta, mean);
  if (f.bounded() && !f.support().contains(y)) {
    throw OutOfSupport(fmt::format("y={} outside [{}, {}]", y, f.support().lo, f.support().hi));
  }
  if ((f.kind() == DensityKind::Lognormal) && !(y > 0.0)) {
    throw OutOfSupport(fmt::format("y={} outside (0, inf)", y));
  }
  return f(y);
}

Interval support(const DensityFamily& family, double x, std::span<const double> theta,
                 const MeanExpr& mean) {
  return ConditionalDensity(family, x, theta, mean).support();
}

std::vector<double> DesignSpace::grid() const {
  if (grid_n < 2) throw DomainError("design grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(grid_n));
  const double h = domain.width() / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) g[static_cast<std::size_t>(i)] = domain.lo + h * i;
  g.back() = domain.hi;
  return g;
}

}  // namespace discrimax
