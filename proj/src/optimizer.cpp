#include "discrimax/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "discrimax/error.hpp"
#include "discrimax/golden.hpp"
#include "discrimax/parallel.hpp"

namespace discrimax {

namespace {

CriterionReport inner(const Criterion& c, const Design& d, const std::vector<double>* warm, bool local) {
  if (local && warm) {
    try {
      return c.inner_minimize(d, warm, true);
    } catch (const InnerNonConvergent&) {
      // fall back to the full multistart
    }
  }
  return c.inner_minimize(d, warm, false);
}

std::vector<double> divergences(const Criterion& c, const std::vector<double>& xs,
                                const std::vector<double>& theta) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = c.point(xs[i], theta).value; });
  return out;
}

std::vector<double> point_values(const Criterion& c, const std::vector<double>& xs,
                                 const std::vector<double>& theta) {
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = c.point(xs[i], theta).value;
  return v;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

// Central-difference gradients of the point divergences: G(j, i) = dI_i / dtheta_j.
Eigen::MatrixXd divergence_gradients(const Criterion& c, const std::vector<double>& x,
                                     const std::vector<double>& theta) {
  const auto& box = c.problem().model2.theta_box;
  const std::size_t m = theta.size();
  Eigen::MatrixXd g(m, x.size());
  for (std::size_t j = 0; j < m; ++j) {
    const double h = 1e-6 * std::max(std::abs(theta[j]), 1e-2 * box[j].width());
    std::vector<double> tp = theta;
    std::vector<double> tm = theta;
    tp[j] += h;
    tm[j] -= h;
    const auto vp = point_values(c, x, tp);
    const auto vm = point_values(c, x, tm);
    for (std::size_t i = 0; i < x.size(); ++i) g(j, i) = (vp[i] - vm[i]) / (2.0 * h);
  }
  return g;
}

// Equaliser conditions for m + 1 support points: I_i(theta) all equal (Newton in
// theta), then weights with sum w_i grad I_i = 0 and sum w_i = 1.
bool equalise(const Criterion& c, const std::vector<double>& x, std::vector<double>& theta,
              std::vector<double>& w) {
  const std::size_t m = theta.size();
  if (x.size() != m + 1) return false;
  const auto& box = c.problem().model2.theta_box;
  auto residual = [&](const std::vector<double>& v) {
    Eigen::VectorXd r(m);
    for (std::size_t i = 0; i < m; ++i) r(i) = v[i] - v[m];
    return r;
  };
  std::vector<double> v = point_values(c, x, theta);
  if (!all_finite(v)) return false;
  double nr = residual(v).norm();
  for (int it = 0; it < 60; ++it) {
    const double scale = *std::max_element(v.begin(), v.end());
    if (nr <= 1e-14 * scale) break;
    const Eigen::MatrixXd g = divergence_gradients(c, x, theta);
    Eigen::MatrixXd jr(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) jr(i, j) = g(j, i) - g(j, m);
    }
    const Eigen::VectorXd step = jr.fullPivLu().solve(-residual(v));
    if (!step.allFinite()) return false;
    bool accepted = false;
    for (double t = 1.0; t > 1e-9; t *= 0.5) {
      std::vector<double> tn = theta;
      bool inside = true;
      for (std::size_t j = 0; j < m; ++j) {
        tn[j] += t * step(j);
        inside = inside && tn[j] >= box[j].lo && tn[j] <= box[j].hi;
      }
      if (!inside) continue;
      const auto vn = point_values(c, x, tn);
      if (!all_finite(vn)) continue;
      const double nn = residual(vn).norm();
      if (nn < nr) {
        theta = tn;
        v = vn;
        nr = nn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  const double scale = *std::max_element(v.begin(), v.end());
  if (!(scale > 0.0) || nr > 1e-9 * scale) return false;

  const Eigen::MatrixXd g = divergence_gradients(c, x, theta);
  Eigen::MatrixXd a(m + 1, m + 1);
  a.topRows(m) = g;
  a.row(m).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  b(m) = 1.0;
  const Eigen::VectorXd sol = a.fullPivLu().solve(b);
  if (!sol.allFinite() || (a * sol - b).norm() > 1e-8) return false;
  w.assign(sol.data(), sol.data() + sol.size());
  return std::all_of(w.begin(), w.end(), [](double wi) { return wi > 0.0; });
}

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(const std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - tau);
  return out;
}

Design positive_part(const std::vector<double>& x, const std::vector<double>& w) {
  std::vector<double> px, pw;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] > 0.0) {
      px.push_back(x[i]);
      pw.push_back(w[i]);
    }
  }
  return Design::make(std::move(px), std::move(pw));
}

// Projected gradient ascent of the criterion over weights on a fixed support.
// The gradient in w_i is I(x_i, theta*(w)).
Design ascend_weights(const Criterion& c, const Design& start, const RefineOptions& opt,
                      std::vector<double>& theta) {
  const std::vector<double> x = start.points;
  std::vector<double> w = start.weights;
  CriterionReport rep = inner(c, start, &theta, true);
  theta = rep.theta2_star;
  double value = rep.value;
  double s = 0.5;
  for (int it = 0; it < opt.max_iter; ++it) {
    const std::vector<double> g = point_values(c, x, theta);
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
      gmax = std::max(gmax, g[i]);
      if (w[i] > opt.weight_floor) gmin = std::min(gmin, g[i]);
    }
    if (gmax - gmin <= opt.tol * value) break;
    std::vector<double> trial(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = w[i] + s * g[i] / value;
    trial = project_simplex(trial);
    const Design cand = positive_part(x, trial);
    const CriterionReport r = inner(c, cand, &theta, true);
    if (r.value > value) {
      w = trial;
      theta = r.theta2_star;
      value = r.value;
      s = std::min(2.0 * s, 1e6);
    } else {
      s *= 0.25;
      if (s < 1e-14) break;
    }
  }
  return positive_part(x, w);
}

// Largest sensitivity over the grid, with a golden-section polish around the
// grid maximiser and the support points included.
double max_sensitivity(const Criterion& c, const CriterionReport& rep,
                       const std::vector<double>& grid, bool polish) {
  const double v = rep.value;
  const std::vector<double> vals = divergences(c, grid, rep.theta2_star);
  const std::size_t k = argmax_smallest(vals);
  double best = vals[k] - v;
  if (polish && std::isfinite(best)) {
    const double a = grid[k == 0 ? 0 : k - 1];
    const double b = grid[std::min(k + 1, grid.size() - 1)];
    const auto f = [&](double x) { return c.point(x, rep.theta2_star).value; };
    best = std::max(best, golden_max(f, a, b, 1e-10 * (grid.back() - grid.front())).second - v);
  }
  for (double ci : rep.point_contributions) best = std::max(best, ci - v);
  return best;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (grid_n < 2) throw ConfigError("optimizer grid_n must be at least 2");
  if (max_outer_iters < 1) throw ConfigError("optimizer max_outer_iters must be positive");
  if (!(stop_tol > 0.0)) throw ConfigError("optimizer stop_tol must be positive");
  if (!(merge_tol_rel > 0.0)) throw ConfigError("optimizer merge_tol must be positive");
  if (!(weight_floor > 0.0 && weight_floor < 1.0)) throw ConfigError("optimizer weight_floor must be in (0, 1)");
  if (consolidate_every < 1) throw ConfigError("optimizer consolidate_every must be positive");
  if (!(refine_tol > 0.0)) throw ConfigError("optimizer refine_tol must be positive");
  if (stall_iters < 1) throw ConfigError("optimizer stall_iters must be positive");
}

std::size_t argmax_smallest(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("argmax of an empty grid");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isnan(v)) top = std::max(top, v);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= top - 1e-12) return i;
  }
  return 0;
}

Design refine_weights(const Criterion& c, const Design& start, const RefineOptions& opt,
                      const std::vector<double>* warm) {
  Design d = Design::make(start.points, start.weights);
  if (d.size() == 1) return d;
  std::vector<double> theta = warm ? *warm : c.inner_minimize(d).theta2_star;
  const std::size_t m = theta.size();
  for (int round = 0; round < 8; ++round) {
    if (d.size() == 1) return d;
    if (d.size() == m + 1) {
      std::vector<double> th = theta;
      std::vector<double> w;
      if (equalise(c, d.points, th, w)) {
        const Design cand = Design::make(d.points, w);
        const double common = c.eval_at_theta2(cand, th);
        // The equaliser is only the optimum if th is still the minimising theta2.
        const CriterionReport r = inner(c, cand, &th, true);
        if (r.value >= common * (1.0 - 1e-7)) {
          if (*std::min_element(w.begin(), w.end()) >= opt.weight_floor) return cand;
          d = cand;
          theta = r.theta2_star;
        }
      }
    }
    const Design next = drop_small(ascend_weights(c, d, opt, theta), opt.weight_floor);
    if (next.size() == d.size()) return next;
    d = next;
  }
  return d;
}

Design refine_weights(const Criterion& c, const std::vector<double>& support, const RefineOptions& opt) {
  return refine_weights(c, Design::uniform(support), opt, nullptr);
}

namespace {

struct Consolidated {
  Design design;
  CriterionReport report;
};

// Merge, prune, move support points to local maxima of the point divergence
// and reweight, until the support settles.
Consolidated consolidate(const Criterion& c, Design d, std::vector<double> theta,
                         const OptimizerConfig& cfg, const std::vector<double>& grid) {
  const Interval domain{grid.front(), grid.back()};
  const double h = domain.width() / static_cast<double>(grid.size() - 1);
  const double merge_tol = cfg.merge_tol_rel * domain.width();
  RefineOptions ro;
  ro.tol = cfg.refine_tol;
  ro.weight_floor = cfg.weight_floor;
  CriterionReport rep;
  for (int round = 0; round < 30; ++round) {
    d = drop_small(merge_close(d, merge_tol), cfg.weight_floor);
    rep = inner(c, d, &theta, round > 0);
    theta = rep.theta2_star;
    double moved = 0.0;
    if (cfg.polish) {
      // Climb the grid to the local maximum of each point's basin, then refine
      // by golden section between its grid neighbours. Points sharing a basin
      // end up together and merge.
      const std::vector<double> vals = divergences(c, grid, theta);
      std::vector<double> xs(d.size());
      parallel_for(d.size(), [&](std::size_t i) {
        std::size_t j = static_cast<std::size_t>(std::lround((d.points[i] - domain.lo) / h));
        j = std::min(j, grid.size() - 1);
        while (true) {
          if (j + 1 < grid.size() && vals[j + 1] > vals[j]) {
            ++j;
          } else if (j > 0 && vals[j - 1] > vals[j]) {
            --j;
          } else {
            break;
          }
        }
        const auto f = [&](double x) { return c.point(x, theta).value; };
        const double a = grid[j == 0 ? 0 : j - 1];
        const double b = grid[std::min(j + 1, grid.size() - 1)];
        xs[i] = golden_max(f, a, b, 1e-10 * domain.width()).first;
      });
      for (std::size_t i = 0; i < d.size(); ++i) moved = std::max(moved, std::abs(xs[i] - d.points[i]));
      d = merge_close(Design::make(xs, d.weights), merge_tol);
    }
    d = refine_weights(c, d, ro, &theta);
    if (moved <= 1e-9 * domain.width()) break;
  }
  rep = c.inner_minimize(d, &theta, false);
  return {d, rep};
}

}  // namespace

OptimizerResult solve_design(const Criterion& c, const OptimizerConfig& cfg, const Design* initial) {
  cfg.validate();
  const Interval domain = c.problem().space.domain;
  const std::vector<double> grid = DesignSpace{domain, cfg.grid_n}.grid();
  const int m = c.problem().model2.theta_dim;

  Design d;
  if (initial) {
    d = Design::make(initial->points, initial->weights);
  } else {
    const int n0 = std::max(3, m + 2);
    std::vector<double> pts(n0);
    for (int i = 0; i < n0; ++i) pts[i] = domain.lo + domain.width() * i / (n0 - 1);
    d = Design::uniform(pts);
  }

  OptimizerResult out;
  OptimizerTrace& trace = out.trace;
  trace.notes = fmt::format(
      "step 1/(k+1) halved until the criterion does not decrease; every {} iterations: merge "
      "within {:g} x width, drop weights below {:g}, golden-section polish of support points, "
      "weight refinement; grid {} points; stop when max sensitivity <= {:g} x value",
      cfg.consolidate_every, cfg.merge_tol_rel, cfg.weight_floor, cfg.grid_n, cfg.stop_tol);

  CriterionReport rep = c.inner_minimize(d);
  int stalled = 0;
  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    const std::vector<double> vals = divergences(c, grid, rep.theta2_star);
    const std::size_t star = argmax_smallest(vals);
    const double max_psi = vals[star] - rep.value;

    IterationRecord rec;
    rec.iter = k;
    rec.added_point = grid[star];
    rec.max_sensitivity = max_psi;
    rec.event = "step";

    const double before = rep.value;
    double gamma = 1.0 / (k + 1);
    for (int t = 0; t < 40; ++t, gamma *= 0.5) {
      const Design cand = mix(d, grid[star], gamma);
      CriterionReport r = inner(c, cand, &rep.theta2_star, true);
      if (r.value >= before) {
        d = cand;
        rep = std::move(r);
        rec.gamma = gamma;
        break;
      }
    }
    rec.value = rep.value;
    rec.theta2 = rep.theta2_star;
    trace.iterations.push_back(rec);

    stalled = rep.value - before < cfg.stall_tol ? stalled + 1 : 0;
    const bool stall = stalled >= cfg.stall_iters;
    if (k % cfg.consolidate_every == 0 || stall || k == cfg.max_outer_iters) {
      Consolidated cons = consolidate(c, d, rep.theta2_star, cfg, grid);
      IterationRecord crec;
      crec.iter = k;
      crec.event = "consolidate";
      if (cons.report.value >= rep.value * (1.0 - 1e-10)) {
        d = std::move(cons.design);
        rep = std::move(cons.report);
      } else {
        rep = c.inner_minimize(d, &rep.theta2_star, false);
      }
      crec.value = rep.value;
      crec.theta2 = rep.theta2_star;
      crec.max_sensitivity = max_sensitivity(c, rep, grid, cfg.polish);
      trace.iterations.push_back(crec);
      if (crec.max_sensitivity <= cfg.stop_tol * rep.value) {
        trace.converged = true;
        break;
      }
      if (stall) {
        trace.stall_warning = true;
        break;
      }
    }
  }

  rep = c.inner_minimize(d, &rep.theta2_star, false);
  IterationRecord fin;
  fin.iter = trace.iterations.empty() ? 0 : trace.iterations.back().iter;
  fin.event = "final";
  fin.value = rep.value;
  fin.theta2 = rep.theta2_star;
  fin.max_sensitivity = max_sensitivity(c, rep, grid, cfg.polish);
  trace.iterations.push_back(fin);
  trace.max_sensitivity = fin.max_sensitivity;
  trace.converged = fin.max_sensitivity <= cfg.stop_tol * rep.value;

  out.design = std::move(d);
  out.report = std::move(rep);
  return out;
}

}  // namespace discrimax
