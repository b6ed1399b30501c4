#include "discrimax/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "discrimax/error.hpp"
#include "discrimax/golden.hpp"
#include "discrimax/parallel.hpp"

namespace discrimax {

const char* to_string(Verdict v) {
  return v == Verdict::Optimal ? "OPTIMAL" : "NOT_OPTIMAL";
}

SensitivityReport verify(const Criterion& c, const Design& d, const VerifyOptions& opt) {
  return verify(c, d, c.inner_minimize(d), opt);
}

SensitivityReport verify(const Criterion& c, const Design& d, const CriterionReport& inner,
                         const VerifyOptions& opt) {
  if (opt.grid_n < 2) throw DomainError("sensitivity grid needs at least two points");
  d.validate(c.problem().space.domain);
  SensitivityReport rep;
  rep.criterion = inner;
  rep.non_unique = inner.non_unique;
  const double v = inner.value;
  const std::vector<double>& theta = inner.theta2_star;
  const auto psi = [&](double x) { return c.point(x, theta).value - v; };

  const std::vector<double> xs = DesignSpace{c.problem().space.domain, opt.grid_n}.grid();
  rep.grid.resize(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { rep.grid[i] = {xs[i], psi(xs[i])}; });

  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& p : rep.grid) {
    if (p.psi > rep.max_violation) {
      rep.max_violation = p.psi;
      rep.argmax_x = p.x;
    }
  }
  if (opt.polish) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const bool left = i == 0 || rep.grid[i].psi >= rep.grid[i - 1].psi;
      const bool right = i + 1 == xs.size() || rep.grid[i].psi >= rep.grid[i + 1].psi;
      if (left && right && std::isfinite(rep.grid[i].psi)) peaks.push_back(i);
    }
    std::vector<std::pair<double, double>> polished(peaks.size());
    const double tol = 1e-10 * (xs.back() - xs.front());
    parallel_for(peaks.size(), [&](std::size_t k) {
      const std::size_t i = peaks[k];
      polished[k] = golden_max(psi, xs[i == 0 ? 0 : i - 1], xs[std::min(i + 1, xs.size() - 1)], tol);
    });
    for (const auto& [x, p] : polished) {
      if (p > rep.max_violation) {
        rep.max_violation = p;
        rep.argmax_x = x;
      }
    }
  }

  rep.support_residuals.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    rep.support_residuals[i] = inner.point_contributions[i] - v;
    rep.weighted_residual_sum += d.weights[i] * rep.support_residuals[i];
  }

  rep.tol = opt.tol * v;
  bool ok = rep.max_violation <= rep.tol;
  for (double r : rep.support_residuals) ok = ok && std::abs(r) <= rep.tol;
  rep.verdict = ok ? Verdict::Optimal : Verdict::NotOptimal;
  return rep;
}

double efficiency_bound(const SensitivityReport& report, double value) {
  if (!(value > 0.0)) throw DomainError("efficiency bound needs a positive criterion value");
  const double b = value / (value + std::max(0.0, report.max_violation));
  return std::clamp(b, std::numeric_limits<double>::min(), 1.0);
}

bool efficiency_bound_is_heuristic(CriterionKind kind) { return kind != CriterionKind::T; }

}  // namespace discrimax
