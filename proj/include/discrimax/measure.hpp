#pragma once

#include <span>
#include <vector>

#include "discrimax/models.hpp"
#include "discrimax/quadrature.hpp"

namespace discrimax {

/// E_f[g(Y)] by adaptive quadrature in the standardised coordinate of f.
template <class G>
double expect(const ConditionalDensity& f, const G& g, const IntegrateOptions& opt = {}) {
  const double c = f.mass_factor();
  return integrate([&](double z) { return g(f.y_of_z(z)) * c * normal_pdf(z); }, f.z_range(), opt);
}

/// expect() for integrands with a pole just outside the support. Within a few
/// ulps of the pole, 1 + lambda (y - eta) carries rounding noise far above the
/// requested tolerance, so the tolerance is relaxed by factors of 100 (down to
/// 1e-6) until the adaptive rule can certify it.
template <class G>
double expect_near_pole(const ConditionalDensity& f, const G& g, double tol) {
  IntegrateOptions o;
  for (o.tol = tol;; o.tol *= 100.0) {
    try {
      return expect(f, g, o);
    } catch (const NonConvergent&) {
      if (o.tol * 100.0 > 1e-6) throw;
    }
  }
}

/// A ConditionalDensity replaced by a fixed composite Gauss-Legendre rule in its
/// standardised coordinate: nodes y_j with probability weights w_j.
///
/// Interior panels have width at most max_panel_width. Towards each end of the
/// range the panels shrink geometrically (ratio 4) down to edge_resolution, so
/// factors like 1/(1 + lambda (y - eta)) with a pole just beyond an edge stay
/// resolved as long as the pole is farther than edge_resolution (in z) away.
/// Distances of each node to both support edges are stored without cancellation.
class DiscreteDensity {
 public:
  explicit DiscreteDensity(const ConditionalDensity& f, double max_panel_width = 0.25,
                           int order = 16, double edge_resolution = 1e-14);

  const ConditionalDensity& density() const { return f_; }
  std::span<const double> y() const { return y_; }
  std::span<const double> w() const { return w_; }
  /// y_j - y_lo and y_hi - y_j, both nonnegative.
  std::span<const double> from_lo() const { return from_lo_; }
  std::span<const double> to_hi() const { return to_hi_; }
  /// Endpoints of the range covered, in y.
  double y_lo() const { return y_lo_; }
  double y_hi() const { return y_hi_; }
  /// Finest panel at the edges, in z.
  double edge_resolution() const { return edge_resolution_; }
  /// Largest panel width measured in y.
  double max_panel_span() const { return max_panel_span_; }
  std::size_t size() const { return y_.size(); }

  template <class G>
  double sum(const G& g) const {
    double s = 0.0;
    for (std::size_t j = 0; j < y_.size(); ++j) s += w_[j] * g(y_[j]);
    return s;
  }

 private:
  void add_panel(const QuadratureRule& rule, double t_lo, double t_hi, bool from_low_edge);

  ConditionalDensity f_;
  std::vector<double> y_;
  std::vector<double> w_;
  std::vector<double> from_lo_;
  std::vector<double> to_hi_;
  Interval z_;
  double y_lo_ = 0.0;
  double y_hi_ = 0.0;
  double edge_resolution_ = 0.0;
  double max_panel_span_ = 0.0;
};

}  // namespace discrimax
