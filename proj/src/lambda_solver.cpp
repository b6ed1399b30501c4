#include "discrimax/lambda_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "discrimax/error.hpp"
#include "discrimax/root_finding.hpp"

namespace discrimax {

namespace {

constexpr double kEqualMeans = 1e-12;
// Fixed-rule sums for the exponential tilt are trusted while the tilt varies by
// less than this many e-folds across a panel.
constexpr double kTiltPerPanel = 8.0;

// Solves h = 0 on the search interval given h(0). `zero_side` is the end of the
// interval closest to zero (+-delta), `pole_side` the other end.
template <class H>
RootResult bracket_and_solve(const H& h, double h0, double zero_side, double pole_side,
                             int max_iter, int& evals) {
  RootOptions opt;
  opt.max_iter = max_iter;
  const double hz = h(zero_side);
  ++evals;
  if ((hz > 0.0) != (h0 > 0.0) || hz == 0.0) {
    // Root in (0, delta): a purely relative tolerance would chase it toward zero.
    opt.xtol_abs = 1e-8 * std::abs(zero_side);
    RootResult r = find_root(h, 0.0, zero_side, h0, hz, opt);
    evals += r.evals;
    return r;
  }
  const double hp = h(pole_side);
  ++evals;
  if ((hp > 0.0) == (hz > 0.0) && hp != 0.0) {
    throw NoBracket(fmt::format(
        "tilt equation keeps its sign on [{}, {}] (values {:.3g}, {:.3g})",
        std::min(zero_side, pole_side), std::max(zero_side, pole_side), hz, hp));
  }
  RootResult r = find_root(h, zero_side, pole_side, hz, hp, opt);
  evals += r.evals;
  return r;
}

double pole_distance_z(const ConditionalDensity& f, double eta2, double lambda) {
  if (lambda == 0.0) return std::numeric_limits<double>::infinity();
  const double y_pole = eta2 - 1.0 / lambda;
  const Interval zr = f.z_range();
  if (lambda > 0.0) {
    const double zp = f.z_of_y(y_pole);
    return std::isfinite(zp) ? zr.lo - zp : std::numeric_limits<double>::infinity();
  }
  return f.z_of_y(y_pole) - zr.hi;
}

// Calls g(j, q_j, lambda u_j) for every node with q_j = gap + lambda (y_j - y_edge)
// formed from the stored edge distances, so q_j keeps its relative precision when
// the pole is close to the support.
template <class G>
void for_each_ratio(const DiscreteDensity& d, double eta2, double lambda, double gap, const G& g) {
  const auto y = d.y();
  if (lambda >= 0.0) {
    const auto dl = d.from_lo();
    for (std::size_t j = 0; j < y.size(); ++j) g(j, gap + lambda * dl[j], lambda * (y[j] - eta2));
  } else {
    const auto dh = d.to_hi();
    for (std::size_t j = 0; j < y.size(); ++j) g(j, gap - lambda * dh[j], lambda * (y[j] - eta2));
  }
}

// Below this gap the root is re-solved with the gap as the unknown.
constexpr double kGapRefine = 0.5;
// Initial half-width, in ulps of lambda, of the gap bracket around a lambda root.
constexpr int kGapBracketUlps = 64;

double step_ulps(double x, double toward, int n) {
  for (int k = 0; k < n && x != toward; ++k) x = std::nextafter(x, toward);
  return x;
}

// Re-solves h = 0 with the gap as the unknown, starting from a lambda root. A
// root within ~1e-9 of the pole has a gap of that size, which lambda cannot
// carry to full relative precision; solving for the gap can. Leaves sol
// unchanged when no sign change is found around the root.
template <class H, class L>
void refine_in_gap(LambdaSolution& sol, double pole_side, const H& h, const L& lambda_of_gap, int max_iter) {
  const double root = sol.lambda;
  const double g0 = sol.gap;
  const double zero_dir = root > 0.0 ? -INFINITY : INFINITY;
  for (int ulps = kGapBracketUlps; ulps <= (kGapBracketUlps << 12); ulps <<= 4) {
    // 1 - gap is proportional to lambda.
    const double l_in = step_ulps(root, zero_dir, ulps);
    const double l_out = step_ulps(root, pole_side, ulps);
    const double g_top = g0 + (1.0 - g0) * ((root - l_in) / root);
    double g_low = g0 - (1.0 - g0) * ((l_out - root) / root);
    if (!(g_low > 0.0)) g_low = 0.5 * g0;
    const double f_top = h(lambda_of_gap(g_top), g_top);
    const double f_low = h(lambda_of_gap(g_low), g_low);
    sol.evals += 2;
    if ((f_top > 0.0) == (f_low > 0.0)) continue;
    RootOptions opt;
    opt.max_iter = max_iter;
    const RootResult r =
        find_root([&](double g) { return h(lambda_of_gap(g), g); }, g_low, g_top, f_low, f_top, opt);
    sol.evals += r.evals;
    sol.gap = r.root;
    sol.lambda = lambda_of_gap(r.root);
    return;
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("solver delta must lie in (0, 1)");
  if (!(beta > delta) || !std::isfinite(beta)) throw DomainError("solver beta must exceed delta");
  if (max_iter < 1) throw DomainError("solver max_iter must be positive");
  if (!(pole_offset > 0.0 && pole_offset < 0.5)) throw DomainError("pole offset must lie in (0, 0.5)");
  if (!(quad_tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
}

Interval lambda_a_bracket(Interval support, double mean1, double eta2, const SolverConfig& cfg) {
  if (mean1 > eta2) {
    const double pole = 1.0 / (eta2 - support.lo);
    const double hi = pole - cfg.pole_offset * (pole - cfg.delta);
    return {cfg.delta, hi};
  }
  const double pole = -1.0 / (support.hi - eta2);
  const double lo = pole + cfg.pole_offset * (-cfg.delta - pole);
  return {lo, -cfg.delta};
}

double lambda_a_equation(const ConditionalDensity& f1, double eta2, double lambda, double tol) {
  return -expect_near_pole(
      f1,
      [&](double y) {
        const double u = y - eta2;
        return u / (1.0 + lambda * u);
      },
      tol);
}

double ratio_gap(Interval support, double eta2, double lambda) {
  return 1.0 + lambda * ((lambda >= 0.0 ? support.lo : support.hi) - eta2);
}

bool ratio_rule_resolves(const DiscreteDensity& d, double eta2, double lambda) {
  return pole_distance_z(d.density(), eta2, lambda) >= d.edge_resolution();
}

double ratio_normalisation(const DiscreteDensity& d, double eta2, double lambda, double gap) {
  const auto w = d.w();
  double acc = 0.0;
  for_each_ratio(d, eta2, lambda, gap, [&](std::size_t j, double q, double) { acc += w[j] / q; });
  return acc;
}

double ratio_log_mean(const DiscreteDensity& d, double eta2, double lambda, double gap) {
  const auto w = d.w();
  double acc = 0.0;
  for_each_ratio(d, eta2, lambda, gap, [&](std::size_t j, double q, double lu) {
    acc += w[j] * (std::abs(lu) < 0.5 ? std::log1p(lu) : std::log(q));
  });
  return acc;
}

double ratio_normalisation(const DiscreteDensity& d, double eta2, double lambda) {
  return ratio_normalisation(d, eta2, lambda, ratio_gap(d.density().support(), eta2, lambda));
}

double ratio_log_mean(const DiscreteDensity& d, double eta2, double lambda) {
  return ratio_log_mean(d, eta2, lambda, ratio_gap(d.density().support(), eta2, lambda));
}

namespace {

LambdaSolution solve_ratio_tilt(const DiscreteDensity& d, double eta2, const SolverConfig& cfg) {
  cfg.validate();
  const ConditionalDensity& f = d.density();
  const Interval s = f.support();
  if (!(s.lo < eta2 && eta2 < s.hi)) {
    throw DomainError(fmt::format("eta2={} is not inside the support [{}, {}]", eta2, s.lo, s.hi));
  }
  LambdaSolution sol;
  const double m1 = f.mean();
  if (std::abs(m1 - eta2) <= kEqualMeans) {
    sol.residual = std::abs(d.sum([](double) { return 1.0; }) - 1.0);
    return sol;
  }
  sol.bracket = lambda_a_bracket(s, m1, eta2, cfg);
  const bool positive = m1 > eta2;
  const double zero_side = positive ? sol.bracket.lo : sol.bracket.hi;
  const double pole_side = positive ? sol.bracket.hi : sol.bracket.lo;

  const double y_edge = positive ? s.lo : s.hi;
  auto h_tilt = [&](double l, double g) {
    const auto y = d.y();
    const auto w = d.w();
    double acc = 0.0;
    for_each_ratio(d, eta2, l, g, [&](std::size_t j, double q, double) { acc += w[j] * (y[j] - eta2) / q; });
    return -acc;
  };
  auto h_disc = [&](double l) { return h_tilt(l, ratio_gap(s, eta2, l)); };
  // lambda as a function of the gap; exact in the gap near the pole.
  const double span = std::abs(eta2 - y_edge);
  auto lambda_of_gap = [&](double g) { return (positive ? 1.0 : -1.0) * (1.0 - g) / span; };
  sol.status = LambdaStatus::Root;
  bool trusted = false;
  try {
    sol.lambda =
        bracket_and_solve(h_disc, h_disc(0.0), zero_side, pole_side, cfg.max_iter, sol.evals).root;
    trusted = ratio_rule_resolves(d, eta2, sol.lambda);
  } catch (const NoBracket&) {
    // Trust the verdict only if the rule resolves the pole-side end.
    if (ratio_rule_resolves(d, eta2, pole_side)) throw;
  }
  if (trusted) {
    sol.gap = ratio_gap(s, eta2, sol.lambda);
    if (sol.gap < kGapRefine) refine_in_gap(sol, pole_side, h_tilt, lambda_of_gap, cfg.max_iter);
    sol.residual = std::abs(ratio_normalisation(d, eta2, sol.lambda, sol.gap) - 1.0);
    return sol;
  }
  // The root sits close to the pole: redo with adaptive quadrature.
  auto h_ad = [&](double l) { return lambda_a_equation(f, eta2, l, cfg.quad_tol); };
  const RootResult ra =
      bracket_and_solve(h_ad, h_ad(0.0), zero_side, pole_side, cfg.max_iter, sol.evals);
  sol.lambda = ra.root;
  sol.gap = ratio_gap(s, eta2, sol.lambda);
  sol.adaptive = true;
  const double l = sol.lambda;
  sol.residual = std::abs(
      expect_near_pole(f, [&](double y) { return 1.0 / (1.0 + l * (y - eta2)); }, cfg.quad_tol) -
      1.0);
  return sol;
}

}  // namespace

LambdaSolution solve_lambda_a(const DiscreteDensity& d, double eta2, const SolverConfig& cfg) {
  try {
    return solve_ratio_tilt(d, eta2, cfg);
  } catch (const NonConvergent& e) {
    const ConditionalDensity& f = d.density();
    throw NonConvergent(fmt::format("{} (ratio tilt: eta2={:.17g}, mean={:.17g}, support=[{:.17g}, {:.17g}])",
                                    e.what(), eta2, f.mean(), f.support().lo, f.support().hi));
  }
}

LambdaSolution solve_lambda_a(const ConditionalDensity& f1, double eta2, const SolverConfig& cfg) {
  return solve_lambda_a(DiscreteDensity(f1), eta2, cfg);
}

namespace {

// Tilted mean minus eta1 under the fixed rule, centred so exponents never overflow.
double tilt_gap_discrete(const DiscreteDensity& d, double lambda, double eta1) {
  const auto y = d.y();
  const auto w = d.w();
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (w[j] > 0.0) top = std::max(top, -lambda * (y[j] - eta1));
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double e = std::exp(-lambda * (y[j] - eta1) - top);
    num += w[j] * (y[j] - eta1) * e;
    den += w[j] * e;
  }
  return num / den;
}

double tilt_gap_adaptive(const ConditionalDensity& f, double lambda, double eta1, double tol) {
  const Interval s = f.support();
  const double top = std::max(-lambda * (s.lo - eta1), -lambda * (s.hi - eta1));
  IntegrateOptions o;
  o.tol = tol;
  const double num =
      expect(f, [&](double y) { return (y - eta1) * std::exp(-lambda * (y - eta1) - top); }, o);
  const double den = expect(f, [&](double y) { return std::exp(-lambda * (y - eta1) - top); }, o);
  return num / den;
}

}  // namespace

double tilted_mean(const ConditionalDensity& f2, double lambda, double tol) {
  const double c = f2.mean();
  return c + tilt_gap_adaptive(f2, lambda, c, tol);
}

LambdaSolution solve_lambda_b(const DiscreteDensity& d, double eta1, const SolverConfig& cfg) {
  cfg.validate();
  const ConditionalDensity& f = d.density();
  const Interval s = f.support();
  if (!(s.lo < eta1 && eta1 < s.hi)) {
    throw DomainError(fmt::format("eta1={} is not inside the support [{}, {}]", eta1, s.lo, s.hi));
  }
  LambdaSolution sol;
  const double m2 = f.mean();
  if (std::abs(eta1 - m2) <= kEqualMeans) {
    sol.residual = std::abs(m2 - eta1);
    return sol;
  }
  const bool positive = eta1 < m2;  // the tilt must pull the mean down
  sol.bracket = positive ? Interval{cfg.delta, cfg.beta} : Interval{-cfg.beta, -cfg.delta};
  const double zero_side = positive ? cfg.delta : -cfg.delta;
  const double far_side = positive ? cfg.beta : -cfg.beta;
  auto g = [&](double l) { return tilt_gap_discrete(d, l, eta1); };
  sol.status = LambdaStatus::Root;
  RootResult r = bracket_and_solve(g, g(0.0), zero_side, far_side, cfg.max_iter, sol.evals);
  sol.lambda = r.root;
  if (std::abs(sol.lambda) * d.max_panel_span() <= kTiltPerPanel) {
    sol.residual = std::abs(g(sol.lambda));
    return sol;
  }
  auto ga = [&](double l) { return tilt_gap_adaptive(f, l, eta1, cfg.quad_tol); };
  r = bracket_and_solve(ga, ga(0.0), zero_side, far_side, cfg.max_iter, sol.evals);
  sol.lambda = r.root;
  sol.adaptive = true;
  sol.residual = std::abs(ga(sol.lambda));
  return sol;
}

LambdaSolution solve_lambda_b(const ConditionalDensity& f2, double eta1, const SolverConfig& cfg) {
  if (f2.kind() == DensityKind::Normal) {
    cfg.validate();
    LambdaSolution sol;
    sol.lambda = (f2.eta() - eta1) / f2.variance();
    sol.bracket = {sol.lambda, sol.lambda};
    sol.status = std::abs(eta1 - f2.eta()) <= kEqualMeans ? LambdaStatus::Zero : LambdaStatus::Root;
    if (sol.status == LambdaStatus::Zero) sol.lambda = 0.0;
    return sol;
  }
  if (!f2.bounded()) {
    throw UnboundedSupport("exponential tilt of an untruncated lognormal density is not defined");
  }
  return solve_lambda_b(DiscreteDensity(f2), eta1, cfg);
}

}  // namespace discrimax
