#include "discrimax/criteria.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

#include <fmt/format.h>

#include "discrimax/error.hpp"
#include "discrimax/lowdisc.hpp"
#include "discrimax/nelder_mead.hpp"
#include "discrimax/parallel.hpp"

namespace discrimax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kCacheCap = 4096;

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool truncated(DensityKind k) {
  return k == DensityKind::TruncatedNormal || k == DensityKind::TruncatedLognormal;
}

double rel_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  double n = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    d += (a[j] - b[j]) * (a[j] - b[j]);
    n += b[j] * b[j];
  }
  return std::sqrt(d) / std::max(1.0, std::sqrt(n));
}

}  // namespace

const char* to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::T: return "T";
    case CriterionKind::KLNormal: return "KLNORMAL";
    case CriterionKind::KL: return "KL";
    case CriterionKind::SklA: return "SKL_A";
    case CriterionKind::SklB: return "SKL_B";
  }
  return "?";
}

CriterionKind parse_criterion(std::string_view s) {
  const std::string u = upper(s);
  if (u == "T") return CriterionKind::T;
  if (u == "KLNORMAL") return CriterionKind::KLNormal;
  if (u == "KL") return CriterionKind::KL;
  if (u == "SKL_A") return CriterionKind::SklA;
  if (u == "SKL_B") return CriterionKind::SklB;
  throw ConfigError(fmt::format("unknown criterion '{}' (expected T, KLNORMAL, KL, SKL_A or SKL_B)", s));
}

void Problem::validate() const {
  if (!(space.domain.lo < space.domain.hi) || !std::isfinite(space.domain.lo) ||
      !std::isfinite(space.domain.hi)) {
    throw ConfigError("design domain must be a finite interval with lo < hi");
  }
  if (space.grid_n < 2) throw ConfigError("design grid needs at least two points");
  if (static_cast<int>(theta1.size()) < model1.mean.arity()) {
    throw ConfigError(fmt::format("model1 needs {} parameters, theta1 has {}", model1.mean.arity(),
                                  theta1.size()));
  }
  if (model2.theta_dim < 1 || static_cast<int>(model2.theta_box.size()) != model2.theta_dim) {
    throw ConfigError("model2 needs a parameter box with one interval per parameter");
  }
  for (const Interval& b : model2.theta_box) {
    if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw ConfigError("model2 box intervals must be finite with lo <= hi");
    }
  }
  if (density1 && density1->variance_expr().arity() > static_cast<int>(theta1.size())) {
    throw ConfigError("variance of density1 uses more parameters than theta1 has");
  }
  if (density2 && density2->variance_expr().arity() > model2.theta_dim) {
    throw ConfigError("variance of density2 uses more parameters than model2 has");
  }
  switch (kind) {
    case CriterionKind::T:
      break;
    case CriterionKind::KLNormal:
      if (!density2 && !(density1 && density1->variance_expr().arity() == 0)) {
        throw ConfigError("KLNORMAL needs the variance of density2 (or a constant variance of density1)");
      }
      break;
    case CriterionKind::KL:
      if (!density1 || !density2) throw ConfigError("KL needs density1 and density2");
      break;
    case CriterionKind::SklA:
      if (!density1) throw ConfigError("SKL_A needs density1");
      if (!truncated(density1->kind())) {
        throw ConfigError("SKL_A needs a truncated density1 (truncated_normal or truncated_lognormal)");
      }
      break;
    case CriterionKind::SklB:
      if (!density2) throw ConfigError("SKL_B needs density2");
      if (density2->kind() == DensityKind::Lognormal) {
        throw ConfigError("SKL_B needs density2 normal or truncated; an untruncated lognormal has no exponential tilt");
      }
      break;
  }
  solver.validate();
  if (inner.starts < 0) throw ConfigError("inner starts must be nonnegative");
}

struct Criterion::Cache {
  std::mutex mu;
  std::unordered_map<std::uint64_t, std::shared_ptr<const DiscreteDensity>> f1;
};

Criterion::Criterion(Problem problem) : p_(std::move(problem)), cache_(std::make_unique<Cache>()) {
  p_.validate();
}

Criterion::~Criterion() = default;

double Criterion::eta1(double x) const { return p_.model1.eta(x, p_.theta1); }

double Criterion::eta2(double x, std::span<const double> theta2) const {
  return p_.model2.eta(x, theta2);
}

std::shared_ptr<const DiscreteDensity> Criterion::f1_at(double x) const {
  const std::uint64_t key = std::bit_cast<std::uint64_t>(x);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->f1.find(key);
    if (it != cache_->f1.end()) return it->second;
  }
  auto d = std::make_shared<const DiscreteDensity>(
      ConditionalDensity(*p_.density1, x, p_.theta1, p_.model1.mean));
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (cache_->f1.size() < kCacheCap) cache_->f1.emplace(key, d);
  return d;
}

PointDivergence Criterion::point(double x, std::span<const double> theta2) const {
  PointDivergence p;
  p.x = x;
  auto infeasible = [&p] {
    p.status = PointStatus::Infeasible;
    p.value = kInf;
    return p;
  };
  try {
    switch (p_.kind) {
      case CriterionKind::T: {
        p.eta1 = eta1(x);
        p.eta2 = eta2(x, theta2);
        const double d = p.eta1 - p.eta2;
        p.value = d * d;
        if (!std::isfinite(p.value)) return infeasible();
        return p;
      }
      case CriterionKind::KLNormal: {
        p.eta1 = eta1(x);
        p.eta2 = eta2(x, theta2);
        const double v = p_.density2 ? p_.density2->variance(x, theta2)
                                     : p_.density1->variance(x, p_.theta1);
        const double d = p.eta1 - p.eta2;
        p.value = d * d / v;
        if (!std::isfinite(p.value)) return infeasible();
        return p;
      }
      case CriterionKind::KL: {
        const ConditionalDensity f1(*p_.density1, x, p_.theta1, p_.model1.mean);
        const ConditionalDensity f2(*p_.density2, x, theta2, p_.model2.mean);
        p.eta1 = f1.eta();
        p.eta2 = f2.eta();
        p.value = p_.kl_orientation == KlOrientation::Forward ? kl_point(f1, f2, p_.solver.quad_tol)
                                                              : kl_point(f2, f1, p_.solver.quad_tol);
        if (!std::isfinite(p.value)) return infeasible();
        return p;
      }
      case CriterionKind::SklA: {
        const auto d = f1_at(x);
        const double e2 = eta2(x, theta2);
        if (!std::isfinite(e2)) {
          p.eta1 = d->density().eta();
          p.eta2 = e2;
          return infeasible();
        }
        PointDivergence r = skl_a_point(*d, e2, p_.solver);
        r.x = x;
        return r;
      }
      case CriterionKind::SklB: {
        const double e1 = eta1(x);
        const ConditionalDensity f2(*p_.density2, x, theta2, p_.model2.mean);
        PointDivergence r = skl_b_point(f2, e1, p_.solver);
        r.x = x;
        return r;
      }
    }
  } catch (const DomainError&) {
    return infeasible();
  } catch (const InvalidVariance&) {
    return infeasible();
  } catch (const SupportMismatch&) {
    return infeasible();
  }
  return p;
}

PointValue Criterion::point_value(double x, std::span<const double> theta2) const {
  const PointDivergence p = point(x, theta2);
  PointValue v;
  v.status = p.status;
  if (p.status != PointStatus::Infeasible) {
    v.value = p.value;
    return v;
  }
  v.value = kInf;
  // Distance of the required mean from the support, relative to its width, so
  // the inner search is pushed back towards feasibility.
  v.infeasibility = 1.0;
  if (p_.kind == CriterionKind::SklA && std::isfinite(p.eta2)) {
    const Interval s = f1_at(x)->density().support();
    const double out = std::max({s.lo - p.eta2, p.eta2 - s.hi, 0.0});
    v.infeasibility = 1.0 + out / (s.hi - s.lo);
  } else if (std::isfinite(p.eta1) && std::isfinite(p.eta2)) {
    v.infeasibility = 1.0 + std::abs(p.eta1 - p.eta2) / std::max(1.0, std::abs(p.eta1));
  }
  return v;
}

double Criterion::eval_at_theta2(const Design& d, std::span<const double> theta2) const {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += d.weights[i] * point(d.points[i], theta2).value;
  return s;
}

std::string Criterion::convention() const {
  switch (p_.kind) {
    case CriterionKind::T:
      return "sum_i w_i (eta1(x_i) - eta2(x_i, theta2))^2";
    case CriterionKind::KLNormal:
      return "sum_i w_i (eta1 - eta2)^2 / v2^2(x_i, theta2); SKL_B with a normal f2 equals "
             "one half of this value";
    case CriterionKind::KL:
      return p_.kl_orientation == KlOrientation::Forward
                 ? "natural log; sum_i w_i KL(f1 || f2) at x_i"
                 : "natural log; sum_i w_i KL(f2 || f1) at x_i";
    case CriterionKind::SklA:
      return "natural log; sum_i w_i min KL(f1 || g) over densities g on supp f1 with mean "
             "eta2; boundary points use the pole-side end of the tilt bracket";
    case CriterionKind::SklB:
      return "natural log; sum_i w_i min KL(g || f2) over densities g with mean eta1; with a "
             "normal f2 this is one half of KLNORMAL";
  }
  return {};
}

CriterionReport Criterion::inner_minimize(const Design& d, const std::vector<double>* warm,
                                          bool local_only) const {
  const int dim = p_.model2.theta_dim;
  std::vector<double> lo(dim), hi(dim);
  for (int j = 0; j < dim; ++j) {
    lo[j] = p_.model2.theta_box[j].lo;
    hi[j] = p_.model2.theta_box[j].hi;
  }
  // Warm up the f1 cache before the threads start.
  if (p_.kind == CriterionKind::SklA) {
    for (double x : d.points) f1_at(x);
  }

  const Objective objective = [&](std::span<const double> theta) {
    double s = 0.0;
    double infeas = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const PointValue v = point_value(d.points[i], theta);
      if (v.status == PointStatus::Infeasible) {
        infeas += d.weights[i] * v.infeasibility;
      } else {
        s += d.weights[i] * v.value;
      }
    }
    return infeas > 0.0 ? kInfeasiblePenalty * (1.0 + infeas) : s;
  };

  std::vector<StartRecord> runs;
  if (!(local_only && warm)) {
    for (const auto& u : scrambled_halton(p_.inner.starts, dim, p_.inner.seed)) {
      StartRecord r;
      r.start.resize(dim);
      for (int j = 0; j < dim; ++j) r.start[j] = lo[j] + u[j] * (hi[j] - lo[j]);
      runs.push_back(std::move(r));
    }
  }
  if (warm) {
    if (static_cast<int>(warm->size()) != dim) throw DomainError("warm start has the wrong dimension");
    StartRecord r;
    r.start = *warm;
    for (int j = 0; j < dim; ++j) r.start[j] = std::clamp(r.start[j], lo[j], hi[j]);
    r.warm = true;
    runs.push_back(std::move(r));
  }
  if (runs.empty()) throw DomainError("inner minimization has no starting points");

  parallel_for(runs.size(), [&](std::size_t k) {
    NelderMeadOptions o;
    o.initial_step = runs[k].warm ? p_.inner.warm_step : p_.inner.start_step;
    o.xtol = p_.inner.xtol;
    o.ftol_rel = p_.inner.ftol_rel;
    // Absolute floor from the start's value, so a zero minimum can converge.
    const double f0 = objective(runs[k].start);
    runs[k].start_value = f0;
    o.ftol_abs = f0 < kInfeasiblePenalty ? std::max(1e-300, p_.inner.ftol_rel * f0) : 1e-300;
    o.max_evals = p_.inner.max_evals;
    const NelderMeadResult res = nelder_mead(objective, runs[k].start, lo, hi, o);
    runs[k].theta = res.x;
    runs[k].value = res.value;
    runs[k].evals = res.evals;
    runs[k].converged = res.converged && res.value < kInfeasiblePenalty;
  });

  std::size_t best = runs.size();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k].converged) continue;
    if (best == runs.size() || runs[k].value < runs[best].value) best = k;
  }
  if (best == runs.size()) {
    throw InnerNonConvergent(fmt::format("none of {} inner starts converged", runs.size()));
  }

  CriterionReport rep;
  rep.kind = p_.kind;
  rep.theta2_star = runs[best].theta;
  rep.convention = convention();
  const double vbest = runs[best].value;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (k == best || !runs[k].converged) continue;
    const bool tie = std::abs(runs[k].value - vbest) <= p_.inner.tie_rel * std::abs(vbest);
    if (tie && rel_distance(runs[k].theta, rep.theta2_star) > p_.inner.distinct_rel) {
      rep.non_unique = true;
      rep.alternative_theta2 = runs[k].theta;
      break;
    }
  }
  rep.point_contributions.resize(d.size());
  rep.point_status.resize(d.size());
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const PointDivergence p = point(d.points[i], rep.theta2_star);
    rep.point_contributions[i] = p.value;
    rep.point_status[i] = p.status;
    total += d.weights[i] * p.value;
  }
  rep.value = total;
  rep.inner_multistart_trace = std::move(runs);
  return rep;
}

double efficiency(const Criterion& c, const Design& design, const Design& reference) {
  const CriterionReport rr = c.inner_minimize(reference);
  const double ref = rr.value;
  // Zero up to the inner tolerance, measured against the objective's scale at
  // the feasible starts.
  double scale = 0.0;
  for (const auto& s : rr.inner_multistart_trace) {
    if (s.start_value < kInfeasiblePenalty) scale = std::max(scale, s.start_value);
  }
  if (!(ref > c.problem().inner.ftol_rel * scale)) {
    throw ZeroReference(fmt::format("reference design has {} value {}", to_string(c.kind()), ref));
  }
  return c.inner_minimize(design).value / ref;
}

}  // namespace discrimax
