#include "discrimax/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_lognormal(DensityKind k) {
  return k == DensityKind::Lognormal || k == DensityKind::TruncatedLognormal;
}

// -log integral f exp(-lambda (y - eta1)) dy under the fixed rule.
double neg_log_tilt_discrete(const DiscreteDensity& d, double lambda, double eta1) {
  const auto y = d.y();
  const auto w = d.w();
  double top = -kInf;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (w[j] > 0.0) top = std::max(top, -lambda * (y[j] - eta1));
  }
  if (top < 1.0) {
    // Near lambda = 0 the integral is close to one: sum expm1 terms to keep precision.
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) s += w[j] * std::expm1(-lambda * (y[j] - eta1));
    s += d.sum([](double) { return 1.0; }) - 1.0;
    return -std::log1p(s);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) s += w[j] * std::exp(-lambda * (y[j] - eta1) - top);
  return -(top + std::log(s));
}

double neg_log_tilt_adaptive(const ConditionalDensity& f, double lambda, double eta1, double tol) {
  IntegrateOptions o;
  o.tol = tol;
  const Interval s = f.support();
  const double top = std::max(-lambda * (s.lo - eta1), -lambda * (s.hi - eta1));
  if (top < 1.0) {
    const double m = expect(f, [&](double y) { return std::expm1(-lambda * (y - eta1)); }, o);
    return -std::log1p(m);
  }
  const double m = expect(f, [&](double y) { return std::exp(-lambda * (y - eta1) - top); }, o);
  return -(top + std::log(m));
}

double log_ratio_value(const ConditionalDensity& f, double eta2, double lambda, double tol) {
  return expect_near_pole(f, [&](double y) { return std::log1p(lambda * (y - eta2)); }, tol);
}

}  // namespace

const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Ok: return "ok";
    case PointStatus::Boundary: return "boundary";
    case PointStatus::Infeasible: return "infeasible";
  }
  return "?";
}

double kl_point(const ConditionalDensity& f1, const ConditionalDensity& f2, double tol) {
  const DensityKind k1 = f1.kind();
  const DensityKind k2 = f2.kind();
  if (k1 == DensityKind::Normal && k2 == DensityKind::Normal) {
    const double v1 = f1.variance();
    const double v2 = f2.variance();
    const double d = f1.eta() - f2.eta();
    return 0.5 * std::log(v2 / v1) + (v1 + d * d) / (2.0 * v2) - 0.5;
  }
  if (k1 == DensityKind::Lognormal && k2 == DensityKind::Lognormal) {
    const double s1 = f1.scale();
    const double s2 = f2.scale();
    const double d = f1.location() - f2.location();
    return std::log(s2 / s1) + (s1 * s1 + d * d) / (2.0 * s2 * s2) - 0.5;
  }
  // Quadrature: supp f1 must lie inside supp f2.
  if (f2.bounded()) {
    if (!f1.bounded()) throw SupportMismatch("f1 has unbounded support but f2 is truncated");
    const Interval a = f1.support();
    const Interval b = f2.support();
    const double slack = 1e-12 * std::max({1.0, std::abs(b.lo), std::abs(b.hi)});
    if (a.lo < b.lo - slack || a.hi > b.hi + slack) {
      throw SupportMismatch(fmt::format("support [{}, {}] of f1 is not inside [{}, {}] of f2",
                                        a.lo, a.hi, b.lo, b.hi));
    }
  }
  if (is_lognormal(k2) && !is_lognormal(k1)) {
    if (!f1.bounded() || f1.support().lo <= 0.0) {
      throw SupportMismatch("f1 puts mass on y <= 0 where the lognormal f2 vanishes");
    }
  }
  IntegrateOptions o;
  o.tol = tol;
  const double v = expect(
      f1,
      [&](double y) {
        const double l2 = f2.log_pdf(y);
        if (!std::isfinite(l2)) throw SupportMismatch(fmt::format("f2 vanishes at y={}", y));
        return f1.log_pdf(y) - l2;
      },
      o);
  return std::max(0.0, v);
}

PointDivergence skl_a_point(const DiscreteDensity& d, double eta2, const SolverConfig& cfg) {
  const ConditionalDensity& f = d.density();
  PointDivergence p;
  p.eta1 = f.eta();
  p.eta2 = eta2;
  const Interval s = f.support();
  if (!(s.lo < eta2 && eta2 < s.hi)) {
    p.status = PointStatus::Infeasible;
    p.value = kInf;
    return p;
  }
  try {
    p.lambda = solve_lambda_a(d, eta2, cfg);
  } catch (const NoBracket&) {
    // The dual objective E log(1 + lambda u) is then monotone on the bracket and
    // its supremum is approached at the pole-side end.
    const Interval br = lambda_a_bracket(s, f.mean(), eta2, cfg);
    p.lambda.bracket = br;
    const bool positive = f.mean() > eta2;
    p.lambda.lambda = positive ? br.hi : br.lo;
    // Gap at the pole-side end of the bracket, in closed form.
    const double span = positive ? eta2 - s.lo : s.hi - eta2;
    p.lambda.gap = cfg.pole_offset * (1.0 - cfg.delta * span);
    p.lambda.status = LambdaStatus::Boundary;
    p.status = PointStatus::Boundary;
    p.lambda.adaptive = !ratio_rule_resolves(d, eta2, p.lambda.lambda);
    p.value = p.lambda.adaptive ? log_ratio_value(f, eta2, p.lambda.lambda, cfg.quad_tol)
                                : ratio_log_mean(d, eta2, p.lambda.lambda, p.lambda.gap);
    p.value = std::max(0.0, p.value);
    return p;
  }
  const double l = p.lambda.lambda;
  if (p.lambda.status == LambdaStatus::Zero) {
    p.value = 0.0;
  } else if (p.lambda.adaptive) {
    p.value = log_ratio_value(f, eta2, l, cfg.quad_tol);
  } else {
    p.value = ratio_log_mean(d, eta2, l, p.lambda.gap);
  }
  p.value = std::max(0.0, p.value);
  return p;
}

PointDivergence skl_a_point(const ConditionalDensity& f1, double eta2, const SolverConfig& cfg) {
  return skl_a_point(DiscreteDensity(f1), eta2, cfg);
}

PointDivergence skl_b_point(const DiscreteDensity& d, double eta1, const SolverConfig& cfg) {
  const ConditionalDensity& f = d.density();
  PointDivergence p;
  p.eta1 = eta1;
  p.eta2 = f.eta();
  const Interval s = f.support();
  if (!(s.lo < eta1 && eta1 < s.hi)) {
    p.status = PointStatus::Infeasible;
    p.value = kInf;
    return p;
  }
  try {
    p.lambda = solve_lambda_b(d, eta1, cfg);
  } catch (const NoBracket&) {
    // Tilts beyond beta are not searched; report the dual bound at the bracket end.
    const bool positive = eta1 < f.mean();
    p.lambda.bracket = positive ? Interval{cfg.delta, cfg.beta} : Interval{-cfg.beta, -cfg.delta};
    p.lambda.lambda = positive ? cfg.beta : -cfg.beta;
    p.lambda.status = LambdaStatus::Boundary;
    p.lambda.adaptive = true;
    p.status = PointStatus::Boundary;
    p.value = std::max(0.0, neg_log_tilt_adaptive(f, p.lambda.lambda, eta1, cfg.quad_tol));
    return p;
  }
  const double l = p.lambda.lambda;
  if (p.lambda.status == LambdaStatus::Zero) {
    p.value = 0.0;
  } else if (p.lambda.adaptive) {
    p.value = neg_log_tilt_adaptive(f, l, eta1, cfg.quad_tol);
  } else {
    p.value = neg_log_tilt_discrete(d, l, eta1);
  }
  p.value = std::max(0.0, p.value);
  return p;
}

PointDivergence skl_b_point(const ConditionalDensity& f2, double eta1, const SolverConfig& cfg) {
  if (f2.kind() == DensityKind::Normal) {
    PointDivergence p;
    p.eta1 = eta1;
    p.eta2 = f2.eta();
    p.lambda = solve_lambda_b(f2, eta1, cfg);
    const double dd = eta1 - f2.eta();
    p.value = dd * dd / (2.0 * f2.variance());
    return p;
  }
  if (!f2.bounded()) {
    throw UnboundedSupport("exponential tilt of an untruncated lognormal density is not defined");
  }
  return skl_b_point(DiscreteDensity(f2), eta1, cfg);
}

RatioTiltedDensity optimal_f2(const ConditionalDensity& f1, double eta2, const SolverConfig& cfg) {
  const LambdaSolution sol = solve_lambda_a(f1, eta2, cfg);
  return RatioTiltedDensity(f1, eta2, sol.lambda, sol.gap);
}

ExpTiltedDensity optimal_f1(const ConditionalDensity& f2, double eta1, const SolverConfig& cfg) {
  const LambdaSolution sol = solve_lambda_b(f2, eta1, cfg);
  const double l = sol.lambda;
  double log_norm;
  if (f2.kind() == DensityKind::Normal) {
    // log E exp(-l (Y - eta1)) for Y ~ N(eta2, v^2).
    log_norm = -l * (f2.eta() - eta1) + 0.5 * l * l * f2.variance();
  } else {
    log_norm = -neg_log_tilt_adaptive(f2, l, eta1, cfg.quad_tol);
  }
  return ExpTiltedDensity(f2, eta1, l, log_norm);
}

}  // namespace discrimax
