#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "discrimax/error.hpp"

namespace discrimax {

/// Closed finite interval [lo, hi] with lo < hi.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; }
};

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive, summing to 2
  int order = 0;
};

/// Rule of the given order (2..128): Newton iteration on the Legendre
/// recurrence from Chebyshev initial guesses.
QuadratureRule gauss_legendre(int order);

/// Shared immutable copy of gauss_legendre(order), built on first use.
const QuadratureRule& cached_gauss_legendre(int order);

struct IntegrateOptions {
  double tol = 1e-10;              // relative
  int order = 32;                  // per-panel rule
  std::size_t max_panels = 1u << 14;
};

namespace detail {

struct Panel {
  double lo, hi;
  double value;  // refined estimate (sum over the two halves)
  double abs;    // refined estimate of the integral of |f|
  double err;    // |refined - coarse|
  double left, right;  // half-panel estimates, reused as coarse values when split
  double left_abs, right_abs;
};

inline bool panel_less(const Panel& a, const Panel& b) { return a.err < b.err; }

template <class F>
void apply_rule(const F& f, const QuadratureRule& rule, double lo, double hi, double& value,
                double& abs) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  double sa = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double fy = f(c + h * rule.nodes[i]);
    s += rule.weights[i] * fy;
    sa += rule.weights[i] * std::abs(fy);
  }
  value = s * h;
  abs = sa * h;
}

template <class F>
Panel refine_panel(const F& f, const QuadratureRule& rule, double lo, double hi, double coarse) {
  Panel p{};
  p.lo = lo;
  p.hi = hi;
  const double mid = 0.5 * (lo + hi);
  apply_rule(f, rule, lo, mid, p.left, p.left_abs);
  apply_rule(f, rule, mid, hi, p.right, p.right_abs);
  p.value = p.left + p.right;
  p.abs = p.left_abs + p.right_abs;
  p.err = std::abs(p.value - coarse);
  return p;
}

}  // namespace detail

/// Adaptive Gauss-Legendre integration of f over iv.
///
/// Each panel is estimated with the fixed-order rule and with the same rule on
/// its two halves; the difference is the panel's error estimate. The panel with
/// the largest estimate is split until the summed estimate drops below
/// tol * max(|I|, integral of |f|), so integrals that cancel to zero are still
/// resolved to tol relative to their magnitude scale.
template <class F>
double integrate(const F& f, Interval iv, const IntegrateOptions& opt = {}) {
  if (!(iv.lo < iv.hi)) {
    if (iv.lo == iv.hi) return 0.0;
    throw DomainError("integrate: interval with lo > hi");
  }
  if (!(opt.tol > 0.0)) throw DomainError("integrate: tolerance must be positive");
  const QuadratureRule& rule = cached_gauss_legendre(opt.order);

  double coarse = 0.0;
  double coarse_abs = 0.0;
  detail::apply_rule(f, rule, iv.lo, iv.hi, coarse, coarse_abs);

  std::vector<detail::Panel> heap;
  heap.push_back(detail::refine_panel(f, rule, iv.lo, iv.hi, coarse));
  double total = heap.front().value;
  double total_abs = heap.front().abs;
  double total_err = heap.front().err;

  while (true) {
    if (!std::isfinite(total) || !std::isfinite(total_err)) {
      throw NonConvergent("integrate: non-finite integrand value");
    }
    if (total_err <= opt.tol * std::max(std::abs(total), total_abs)) break;
    if (heap.size() >= opt.max_panels) {
      throw NonConvergent("integrate: panel cap reached before meeting tolerance");
    }
    std::pop_heap(heap.begin(), heap.end(), detail::panel_less);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      throw NonConvergent("integrate: panel width underflow");
    }
    detail::Panel a = detail::refine_panel(f, rule, worst.lo, mid, worst.left);
    detail::Panel b = detail::refine_panel(f, rule, mid, worst.hi, worst.right);
    heap.push_back(a);
    std::push_heap(heap.begin(), heap.end(), detail::panel_less);
    heap.push_back(b);
    std::push_heap(heap.begin(), heap.end(), detail::panel_less);
    total = 0.0;
    total_abs = 0.0;
    total_err = 0.0;
    for (const auto& p : heap) {
      total += p.value;
      total_abs += p.abs;
      total_err += p.err;
    }
  }
  return total;
}

template <class F>
double integrate(const F& f, Interval iv, double tol) {
  IntegrateOptions opt;
  opt.tol = tol;
  return integrate(f, iv, opt);
}

}  // namespace discrimax
