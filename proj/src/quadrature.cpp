#include "discrimax/quadrature.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <numbers>

namespace discrimax {

QuadratureRule gauss_legendre(int order) {
  if (order < 2 || order > 128) throw DomainError("gauss_legendre: order must be in [2, 128]");
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  // Roots are symmetric; solve for the positive half and mirror.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      // p1 = P_n(z), p0 = P_{n-1}(z)
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const QuadratureRule& cached_gauss_legendre(int order) {
  static std::array<std::unique_ptr<QuadratureRule>, 129> cache;
  static std::mutex mutex;
  if (order < 2 || order > 128) throw DomainError("gauss_legendre: order must be in [2, 128]");
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(order)];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_legendre(order));
  return *slot;
}

}  // namespace discrimax
