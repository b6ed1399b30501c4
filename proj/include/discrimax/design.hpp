#pragma once

#include <vector>

#include "discrimax/quadrature.hpp"

namespace discrimax {

/// Approximate design: support points with positive weights summing to one.
struct Design {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }

  /// Sorts by point and rescales weights to sum to one. Throws DomainError on
  /// size mismatch, empty input, non-finite entries or nonpositive weights.
  static Design make(std::vector<double> points, std::vector<double> weights);

  /// Equal weights on the given points.
  static Design uniform(std::vector<double> points);

  /// Throws DomainError unless weights sum to one within 1e-12, points are
  /// inside the domain and pairwise farther apart than merge_tol.
  void validate(Interval domain, double merge_tol = 0.0) const;
};

/// Merges points closer than tol into their weighted mean, summing weights.
Design merge_close(const Design& d, double tol);

/// Drops weights below floor and renormalises. The heaviest point always survives.
Design drop_small(const Design& d, double floor);

/// (1 - gamma) d + gamma delta_x. A point equal to an existing support point
/// receives the mass directly.
Design mix(const Design& d, double x, double gamma);

}  // namespace discrimax
