#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "discrimax/models.hpp"
#include "oracles.hpp"

using namespace discrimax;

namespace {

MeanExpr constant(double v) { return MeanExpr::parse(std::to_string(v)); }

// Lognormal CDF with mean m and variance v, through the series oracle.
double lognormal_cdf(double y, double m, double v) {
  const double s2 = std::log(1.0 + v / (m * m));
  const double mu = std::log(m) - 0.5 * s2;
  return oracle::phi_cdf((std::log(y) - mu) / std::sqrt(s2));
}

}  // namespace

TEST(ModelSpec, ValidatesBox) {
  const auto mean = MeanExpr::parse("p1*x/(x + p2)");
  EXPECT_THROW(ModelSpec::make(mean, {{0.1, 100.0}}), ConfigError);
  EXPECT_THROW(ModelSpec::make(mean, {{1.0, 1.0}, {0.1, 2.0}}), ConfigError);
  EXPECT_THROW(ModelSpec::make(mean, {{0.0, INFINITY}, {0.1, 2.0}}), ConfigError);
  const auto m = ModelSpec::make(mean, {{0.1, 100.0}, {0.1, 100.0}});
  EXPECT_EQ(m.theta_dim, 2);
  const std::vector<double> in{1.0, 50.0}, out{1.0, 150.0};
  EXPECT_TRUE(m.in_box(in));
  EXPECT_FALSE(m.in_box(out));
}

TEST(DesignSpace, GridCoversEndpointsUniformly) {
  const DesignSpace s{{0.1, 5.0}, 401};
  const auto g = s.grid();
  ASSERT_EQ(g.size(), 401u);
  EXPECT_EQ(g.front(), 0.1);
  EXPECT_EQ(g.back(), 5.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] - g[i - 1], 4.9 / 400.0, 1e-14);
  EXPECT_THROW((DesignSpace{{0.0, 1.0}, 1}.grid()), DomainError);
}

TEST(Density, TruncatedNormalPeak) {
  const auto fam = DensityFamily::truncated_normal(constant(1.0), 3.0);
  const ConditionalDensity f(fam, 0.7, 1.0);
  const double expected = oracle::phi_pdf(0.0) / (oracle::phi_cdf(3.0) - oracle::phi_cdf(-3.0));
  EXPECT_NEAR(f(0.7), expected, 1e-12);
  EXPECT_NEAR(expected, 0.40002, 1e-5);
}

TEST(Density, SupportRules) {
  const auto tn = DensityFamily::truncated_normal(constant(1.0), 3.0);
  const auto eta0 = ConditionalDensity(tn, 0.0, 1.0).support();
  EXPECT_DOUBLE_EQ(eta0.lo, -3.0);
  EXPECT_DOUBLE_EQ(eta0.hi, 3.0);
  const auto eta1 = ConditionalDensity(tn, 1.0, 1.0).support();
  EXPECT_DOUBLE_EQ(eta1.lo, -2.0);
  EXPECT_DOUBLE_EQ(eta1.hi, 4.0);

  const auto tln = DensityFamily::truncated_lognormal(constant(0.1), 1e-4, 1 - 1e-4);
  const ConditionalDensity f(tln, 1.0, 0.1);
  EXPECT_NEAR(f.location(), -0.5 * std::log(1.1), 1e-14);
  EXPECT_NEAR(f.scale() * f.scale(), std::log(1.1), 1e-14);
  // Endpoints: bisection on the lognormal CDF.
  const double qlo = oracle::bisect([](double y) { return lognormal_cdf(y, 1.0, 0.1) - 1e-4; }, 0.2, 1.0);
  const double qhi =
      oracle::bisect([](double y) { return lognormal_cdf(y, 1.0, 0.1) - (1 - 1e-4); }, 1.0, 4.0);
  EXPECT_NEAR(f.support().lo, qlo, 1e-9);
  EXPECT_NEAR(f.support().hi, qhi, 1e-9);

  const auto normal = DensityFamily::normal(constant(1.0));
  const MeanExpr m = MeanExpr::parse("p1*x");
  const std::vector<double> th{2.0};
  EXPECT_THROW(support(normal, 1.0, th, m), UnboundedSupport);
}

TEST(Density, Errors) {
  const auto tn = DensityFamily::truncated_normal(constant(1.0), 3.0);
  const MeanExpr m = MeanExpr::parse("p1*x");
  const std::vector<double> th{1.0};
  EXPECT_THROW(density(tn, 5.0, 1.0, th, m), OutOfSupport);
  EXPECT_GT(density(tn, 1.5, 1.0, th, m), 0.0);
  const auto bad = DensityFamily::truncated_normal(MeanExpr::parse("x - 2"), 3.0);
  EXPECT_THROW(density(bad, 1.0, 1.0, th, m), InvalidVariance);
  const auto ln = DensityFamily::lognormal(constant(0.1));
  EXPECT_THROW(density(ln, -1.0, 1.0, th, m), OutOfSupport);
  EXPECT_THROW(DensityFamily::truncated_lognormal(constant(0.1), 0.6, 0.4), DomainError);
  EXPECT_THROW(DensityFamily::truncated_normal(constant(1.0), -1.0), DomainError);
}

TEST(Density, NormalisationAtRandomDraws) {
  // Models and boxes of the bundled examples; theta drawn from the rival box.
  struct Case {
    DensityFamily fam;
    MeanExpr mean;
    Interval xs;
    std::vector<Interval> box;
  };
  const MeanExpr sat = MeanExpr::parse("p1*x/(x + p2)");
  const MeanExpr quad = MeanExpr::parse("p1 + p2*x + p3*x^2");
  std::vector<Case> cases{
      {DensityFamily::truncated_lognormal(constant(0.1), 1e-4, 1 - 1e-4), sat, {0.1, 5.0}, {{0.1, 100}, {0.1, 100}}},
      {DensityFamily::truncated_normal(constant(1.0), 3.0), quad, {-1.0, 1.0}, {{-100, 100}, {-100, 100}, {-100, 100}}},
      {DensityFamily::truncated_normal(MeanExpr::parse("0.5 + x^2"), 2.0), quad, {-1.0, 1.0}, {{-5, 5}, {-5, 5}, {-5, 5}}},
      {DensityFamily::normal(constant(0.3)), quad, {-1.0, 1.0}, {{-5, 5}, {-5, 5}, {-5, 5}}},
      {DensityFamily::lognormal(constant(0.02)), sat, {0.1, 5.0}, {{0.1, 100}, {0.1, 100}}},
  };
  std::mt19937_64 rng(11);
  for (const auto& c : cases) {
    for (int draw = 0; draw < 50; ++draw) {
      const double x = std::uniform_real_distribution<double>(c.xs.lo, c.xs.hi)(rng);
      std::vector<double> th;
      for (const auto& b : c.box) th.push_back(std::uniform_real_distribution<double>(b.lo, b.hi)(rng));
      const ConditionalDensity f(c.fam, x, th, c.mean);
      double mass = 0.0;
      if (f.kind() == DensityKind::Lognormal) {
        const double mu = f.location(), s = f.scale();
        mass = oracle::trapezoid([&](double u) { return f(std::exp(u)) * std::exp(u); }, mu - 40 * s, mu + 40 * s,
                                 200000);
      } else if (f.kind() == DensityKind::Normal) {
        const double sd = std::sqrt(f.variance());
        mass = oracle::trapezoid(f, f.eta() - 40 * sd, f.eta() + 40 * sd, 200000);
      } else if (f.kind() == DensityKind::TruncatedLognormal) {
        // Log space keeps the skewed mass resolvable.
        mass = oracle::trapezoid([&](double u) { return f(std::exp(u)) * std::exp(u); }, std::log(f.support().lo),
                                 std::log(f.support().hi), 200000);
      } else {
        mass = oracle::trapezoid(f, f.support().lo, f.support().hi, 200000);
      }
      EXPECT_NEAR(mass, 1.0, 1e-8) << to_string(c.fam.kind()) << " x=" << x;
      if (f.bounded()) {
        EXPECT_GT(f(0.5 * (f.support().lo + f.support().hi)), 0.0);
      }
    }
  }
}

TEST(Density, MeanIdentities) {
  const MeanExpr m1 = MeanExpr::parse("p1*x + p2*x/(x + p3)");
  const std::vector<double> th1{1.0, 1.0, 1.0};
  for (double v2 : {0.1, 0.02}) {
    const auto tln = DensityFamily::truncated_lognormal(constant(v2), 1e-4, 1 - 1e-4);
    for (double x = 0.1; x <= 5.0; x += 0.35) {
      const ConditionalDensity f(tln, x, th1, m1);
      const auto iv = f.support();
      const double mean = oracle::trapezoid([&](double u) { return std::exp(2 * u) * f(std::exp(u)); },
                                            std::log(iv.lo), std::log(iv.hi), 200000);
      // Truncation moves the mean off eta; mean() must report the truncated value.
      EXPECT_NEAR(mean, f.mean(), 1e-8 * f.mean()) << "x=" << x << " v2=" << v2;
      EXPECT_LT(std::abs(f.mean() - f.eta()), 0.01 * f.eta()) << "x=" << x << " v2=" << v2;
    }
  }
  const auto tn = DensityFamily::truncated_normal(constant(1.0), 3.0);
  for (double eta : {-2.0, 0.0, 0.3, 4.0}) {
    const ConditionalDensity f(tn, eta, 1.0);
    const double mean = oracle::trapezoid([&](double y) { return y * f(y); }, eta - 3.0, eta + 3.0, 200000);
    EXPECT_NEAR(mean, eta, 1e-9);
  }
}
