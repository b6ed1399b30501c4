#include "discrimax/measure.hpp"

#include <algorithm>
#include <cmath>

namespace discrimax {

namespace {

bool log_kind(const ConditionalDensity& f) {
  return f.kind() == DensityKind::Lognormal || f.kind() == DensityKind::TruncatedLognormal;
}

}  // namespace

DiscreteDensity::DiscreteDensity(const ConditionalDensity& f, double max_panel_width, int order,
                                 double edge_resolution)
    : f_(f), z_(f.z_range()), edge_resolution_(edge_resolution) {
  y_lo_ = f.y_of_z(z_.lo);
  y_hi_ = f.y_of_z(z_.hi);
  const QuadratureRule& rule = cached_gauss_legendre(order);
  const double h = std::min(max_panel_width, 0.5 * z_.width());

  // Graded breakpoints measured from an edge: 0, r, 4r, 16r, ... , h.
  std::vector<double> graded{0.0};
  for (double t = edge_resolution; t < h; t *= 4.0) graded.push_back(t);
  graded.push_back(h);

  for (std::size_t k = 0; k + 1 < graded.size(); ++k) add_panel(rule, graded[k], graded[k + 1], true);
  const double middle = z_.width() - 2.0 * h;
  const int n_mid = middle > 0.0 ? static_cast<int>(std::ceil(middle / max_panel_width)) : 0;
  for (int k = 0; k < n_mid; ++k) {
    add_panel(rule, h + middle * k / n_mid, h + middle * (k + 1) / n_mid, true);
  }
  for (std::size_t k = graded.size() - 1; k > 0; --k) add_panel(rule, graded[k], graded[k - 1], false);
}

// A panel given by distances t from one edge of the z range. Distances to the
// edges in y are formed from t directly so they keep full relative precision.
void DiscreteDensity::add_panel(const QuadratureRule& rule, double t_a, double t_b,
                                bool from_low_edge) {
  const double mid = 0.5 * (t_a + t_b);
  const double half = 0.5 * std::abs(t_b - t_a);
  const double c = f_.mass_factor();
  const double s = f_.scale();
  const bool lg = log_kind(f_);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double node = from_low_edge ? rule.nodes[i] : -rule.nodes[rule.nodes.size() - 1 - i];
    const double t = mid + half * node;
    const double z = from_low_edge ? z_.lo + t : z_.hi - t;
    const double y = f_.y_of_z(z);
    double d_lo;
    double d_hi;
    if (from_low_edge) {
      d_lo = lg ? y_lo_ * std::expm1(s * t) : s * t;
      d_hi = y_hi_ - y;
    } else {
      d_hi = lg ? -y_hi_ * std::expm1(-s * t) : s * t;
      d_lo = y - y_lo_;
    }
    y_.push_back(y);
    w_.push_back(half * rule.weights[i] * c * normal_pdf(z));
    from_lo_.push_back(std::max(0.0, d_lo));
    to_hi_.push_back(std::max(0.0, d_hi));
  }
  const double za = from_low_edge ? z_.lo + t_a : z_.hi - t_a;
  const double zb = from_low_edge ? z_.lo + t_b : z_.hi - t_b;
  max_panel_span_ = std::max(max_panel_span_, std::abs(f_.y_of_z(zb) - f_.y_of_z(za)));
}

}  // namespace discrimax
