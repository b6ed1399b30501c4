#pragma once

#include <cmath>
#include <utility>

namespace discrimax {

/// Maximiser of a unimodal f on [a, b] by golden-section search, stopping when
/// the bracket is shorter than tol. The endpoints are compared too, so a
/// maximum on the boundary is returned exactly. Returns (x, f(x)).
template <class F>
std::pair<double, double> golden_max(const F& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = a;
  double hi = b;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  std::pair<double, double> best = f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
  const double fa = f(a);
  const double fb = f(b);
  if (fa > best.second) best = {a, fa};
  if (fb > best.second) best = {b, fb};
  return best;
}

}  // namespace discrimax
