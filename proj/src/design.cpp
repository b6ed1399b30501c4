#include "discrimax/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

Design Design::make(std::vector<double> points, std::vector<double> weights) {
  if (points.empty()) throw DomainError("design has no support points");
  if (points.size() != weights.size()) {
    throw DomainError(fmt::format("design has {} points but {} weights", points.size(),
                                  weights.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw DomainError("design point is not finite");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw DomainError(fmt::format("design weight {} is not positive", weights[i]));
    }
    total += weights[i];
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  Design d;
  for (std::size_t i : order) {
    d.points.push_back(points[i]);
    d.weights.push_back(weights[i] / total);
  }
  return d;
}

Design Design::uniform(std::vector<double> points) {
  std::vector<double> w(points.size(), 1.0);
  return make(std::move(points), std::move(w));
}

void Design::validate(Interval domain, double merge_tol) const {
  if (points.empty() || points.size() != weights.size()) {
    throw DomainError("design needs matching, non-empty points and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!domain.contains(points[i])) {
      throw DomainError(fmt::format("design point {} lies outside [{}, {}]", points[i], domain.lo,
                                    domain.hi));
    }
    if (!(weights[i] > 0.0)) throw DomainError("design weights must be positive");
    total += weights[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(points[i] - points[j]) <= merge_tol) {
        throw DomainError(fmt::format("design points {} and {} are not distinct", points[j],
                                      points[i]));
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("design weights sum to {:.17g}", total));
  }
}

Design merge_close(const Design& d, double tol) {
  Design s = Design::make(d.points, d.weights);
  Design out;
  std::size_t i = 0;
  while (i < s.size()) {
    double w = s.weights[i];
    double wx = s.weights[i] * s.points[i];
    std::size_t j = i + 1;
    while (j < s.size() && s.points[j] - s.points[j - 1] <= tol) {
      w += s.weights[j];
      wx += s.weights[j] * s.points[j];
      ++j;
    }
    out.points.push_back(j == i + 1 ? s.points[i] : wx / w);
    out.weights.push_back(w);
    i = j;
  }
  return out;
}

Design drop_small(const Design& d, double floor) {
  const std::size_t heaviest =
      static_cast<std::size_t>(std::max_element(d.weights.begin(), d.weights.end()) - d.weights.begin());
  std::vector<double> p;
  std::vector<double> w;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.weights[i] >= floor || i == heaviest) {
      p.push_back(d.points[i]);
      w.push_back(d.weights[i]);
    }
  }
  return Design::make(std::move(p), std::move(w));
}

Design mix(const Design& d, double x, double gamma) {
  std::vector<double> p = d.points;
  std::vector<double> w = d.weights;
  for (double& wi : w) wi *= 1.0 - gamma;
  const auto it = std::find(p.begin(), p.end(), x);
  if (it != p.end()) {
    w[static_cast<std::size_t>(it - p.begin())] += gamma;
  } else {
    p.push_back(x);
    w.push_back(gamma);
  }
  return Design::make(std::move(p), std::move(w));
}

}  // namespace discrimax
