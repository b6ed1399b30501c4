#pragma once

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

struct RootOptions {
  double xtol_rel = 4.0 * std::numeric_limits<double>::epsilon();
  double xtol_abs = 0.0;
  double ftol = 0.0;  // stop as soon as |f| <= ftol
  int max_iter = 200;
};

struct RootResult {
  double root = 0.0;
  double f_root = 0.0;
  int evals = 0;
};

/// Root of f on [a, b] given f(a), f(b) of opposite sign.
///
/// Secant (false-position) steps with the Illinois correction; whenever two
/// consecutive steps fail to halve the bracket, a bisection step is forced, so
/// the bracket width shrinks at least geometrically. Throws NonConvergent after
/// max_iter evaluations.
template <class F>
RootResult find_root(const F& f, double a, double b, double fa, double fb,
                     const RootOptions& opt = {}) {
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0)) throw NoBracket("find_root: endpoints do not bracket a root");
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  RootResult best = std::abs(fa) < std::abs(fb) ? RootResult{a, fa, 0} : RootResult{b, fb, 0};
  int slow = 0;
  int side = 0;  // -1 when a moved last, +1 when b moved last
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double width = b - a;
    const double tol = opt.xtol_abs + opt.xtol_rel * std::max(std::abs(a), std::abs(b));
    if (width <= tol) {
      best.evals = it - 1;
      return best;
    }
    double x = b - fb * (b - a) / (fb - fa);
    const double m = a + 0.5 * width;
    if (slow >= 2 || !(x > a && x < b)) {
      x = m;
      slow = 0;
    }
    if (!(x > a && x < b)) {  // adjacent floating-point numbers
      best.evals = it - 1;
      return best;
    }
    const double fx = f(x);
    if (!std::isfinite(fx)) throw NonConvergent(fmt::format("find_root: f({}) is not finite", x));
    if (std::abs(fx) < std::abs(best.f_root)) best = {x, fx, it};
    if (std::abs(fx) <= opt.ftol || fx == 0.0) {
      best.evals = it;
      return best;
    }
    // Illinois step: when one end is retained twice, halve its value so the
    // secant cannot stagnate against it.
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    slow = (b - a) > 0.5 * width ? slow + 1 : 0;
  }
  throw NonConvergent(fmt::format("find_root: no convergence after {} iterations", opt.max_iter));
}

}  // namespace discrimax
