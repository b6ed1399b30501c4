#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "discrimax/models.hpp"
#include "discrimax/quadrature.hpp"
#include "oracles.hpp"

using namespace discrimax;

TEST(GaussLegendre, TwoAndThreePointRules) {
  const auto r2 = gauss_legendre(2);
  ASSERT_EQ(r2.nodes.size(), 2u);
  EXPECT_NEAR(r2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(r2.weights[1], 1.0, 1e-15);

  const auto r3 = gauss_legendre(3);
  ASSERT_EQ(r3.nodes.size(), 3u);
  EXPECT_NEAR(r3.nodes[0], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(r3.nodes[1], 0.0, 1e-15);
  EXPECT_NEAR(r3.nodes[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(r3.weights[0], 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(r3.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(GaussLegendre, StructuralInvariants) {
  for (int n = 2; n <= 128; ++n) {
    const auto r = gauss_legendre(n);
    ASSERT_EQ(r.order, n);
    ASSERT_EQ(static_cast<int>(r.nodes.size()), n);
    ASSERT_EQ(static_cast<int>(r.weights.size()), n);
    EXPECT_GT(r.nodes.front(), -1.0);
    EXPECT_LT(r.nodes.back(), 1.0);
    for (int i = 1; i < n; ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
    for (double w : r.weights) EXPECT_GT(w, 0.0);
    EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 2.0, 1e-12) << n;
  }
}

TEST(GaussLegendre, PolynomialExactness) {
  for (int n : {2, 5, 16, 32, 64}) {
    const auto r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "order " << n << " degree " << k;
    }
  }
}

TEST(Integrate, ConstantAndOddIntegrands) {
  EXPECT_NEAR(integrate([](double) { return 1.0; }, {-3.0, 3.0}), 6.0, 6e-10);
  const double mass = normal_cdf(3.0) - normal_cdf(-3.0);
  const auto g = [&](double y) { return normal_pdf(y) / mass; };
  EXPECT_NEAR(integrate([&](double y) { return y * g(y); }, {-3.0, 3.0}), 0.0, 1e-10);
}

TEST(Integrate, TruncatedNormalMassAgainstTrapezoid) {
  const auto pdf = [](double y) { return oracle::phi_pdf(y); };
  const double trap = oracle::trapezoid(pdf, -3.0, 3.0);
  const double gl = integrate([](double y) { return normal_pdf(y); }, {-3.0, 3.0});
  EXPECT_NEAR(gl, trap, 1e-9);
  const double mass = oracle::phi_cdf(3.0) - oracle::phi_cdf(-3.0);
  EXPECT_NEAR(gl / mass, 1.0, 1e-10);
}

TEST(Integrate, LinearityAndAdditivity) {
  const IntegrateOptions opt{1e-10, 32, 1u << 14};
  const auto f = [](double y) { return std::exp(-y) * std::sin(3.0 * y); };
  const auto g = [](double y) { return 1.0 / (1.0 + y * y); };
  const Interval iv{-2.0, 4.0};
  const double a = 2.5, b = -0.75;
  const double lhs = integrate([&](double y) { return a * f(y) + b * g(y); }, iv, opt);
  const double rhs = a * integrate(f, iv, opt) + b * integrate(g, iv, opt);
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));

  const double whole = integrate(g, iv, opt);
  const double split = integrate(g, {-2.0, 0.7}, opt) + integrate(g, {0.7, 4.0}, opt);
  EXPECT_NEAR(whole, split, 2e-10 * whole);
}

TEST(Integrate, PanelCapRaisesNonConvergent) {
  IntegrateOptions opt;
  opt.tol = 1e-15;
  opt.max_panels = 8;
  const auto step = [](double y) { return y < 0.3 ? 0.0 : 1.0; };
  EXPECT_THROW(integrate(step, {0.0, 1.0}, opt), NonConvergent);
}

TEST(NormalQuantile, AgainstSeriesOracle) {
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(normal_quantile(0.9999), oracle::quantile(0.9999), 1e-9);
  EXPECT_NEAR(normal_quantile(0.9999), 3.71901649, 1e-8);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-4, 1.0 - 1e-4);
  for (int i = 0; i < 50; ++i) {
    const double p = u(rng);
    EXPECT_NEAR(normal_quantile(p), oracle::quantile(p), 1e-9) << p;
    EXPECT_NEAR(normal_quantile(p), -normal_quantile(1.0 - p), 1e-12) << p;
  }
}

TEST(NormalQuantile, DomainErrors) {
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
  EXPECT_THROW(normal_quantile(-0.2), DomainError);
  EXPECT_THROW(normal_quantile(std::nan("")), DomainError);
}

TEST(NormalCdf, AgainstSeriesOracle) {
  for (double z = -4.0; z <= 4.0; z += 0.125) EXPECT_NEAR(normal_cdf(z), oracle::phi_cdf(z), 1e-14) << z;
}
