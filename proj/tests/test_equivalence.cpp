#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "discrimax/config.hpp"
#include "discrimax/equivalence.hpp"
#include "oracles.hpp"

using namespace discrimax;

namespace {

Problem bundled(const char* file, CriterionKind k) { return load_config(config_path(file)).problem(k); }

void expect_invariants(const SensitivityReport& s, const Design& d, Interval dom, int grid_n) {
  ASSERT_GE(s.grid.size(), static_cast<std::size_t>(grid_n));
  EXPECT_EQ(s.grid.front().x, dom.lo);
  EXPECT_EQ(s.grid.back().x, dom.hi);
  ASSERT_EQ(s.support_residuals.size(), d.size());
  double wsum = 0.0;
  bool support_ok = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    wsum += d.weights[i] * s.support_residuals[i];
    support_ok = support_ok && std::abs(s.support_residuals[i]) <= s.tol;
  }
  EXPECT_NEAR(s.weighted_residual_sum, wsum, 1e-15);
  EXPECT_NEAR(wsum, 0.0, 1e-10 * std::max(1.0, s.criterion.value));
  for (const auto& p : s.grid) EXPECT_LE(p.psi, s.max_violation);
  const bool optimal = s.max_violation <= s.tol && support_ok;
  EXPECT_EQ(s.verdict == Verdict::Optimal, optimal);
}

}  // namespace

TEST(Verify, WeightedResidualsVanishOnAnyDesign) {
  const Criterion c(bundled("example-sec5-1-t.ini", CriterionKind::T));
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> p, w;
    for (int i = 0; i < 4; ++i) {
      p.push_back(std::uniform_real_distribution<double>(0.1, 5.0)(rng));
      w.push_back(std::uniform_real_distribution<double>(0.1, 1.0)(rng));
    }
    const Design d = Design::make(p, w);
    const auto s = verify(c, d);
    expect_invariants(s, d, {0.1, 5.0}, 2001);
    EXPECT_EQ(s.verdict, Verdict::NotOptimal);
  }
}

TEST(Verify, OnePointDesignIsNotOptimal) {
  const Criterion c(bundled("example-sec5-1-t.ini", CriterionKind::T));
  const Design d = Design::uniform({2.0});
  const auto s = verify(c, d);
  EXPECT_EQ(s.verdict, Verdict::NotOptimal);
  EXPECT_GT(s.max_violation, s.tol);
  expect_invariants(s, d, {0.1, 5.0}, 2001);
}

TEST(Verify, TableOneTDesignIsCloseToOptimal) {
  // Rounded to three decimals, so only near-optimality is expected here.
  const Criterion c(bundled("example-sec5-1-t.ini", CriterionKind::T));
  const Design d = Design::make({0.508, 2.992, 5.0}, {0.580, 0.298, 0.122});
  const auto s = verify(c, d);
  expect_invariants(s, d, {0.1, 5.0}, 2001);
  EXPECT_LT(s.max_violation, 0.02 * s.criterion.value);
  EXPECT_GT(efficiency_bound(s, s.criterion.value), 0.98);
}

TEST(Verify, ExpModelDesignIsNotOptimal) {
  const Criterion c(bundled("example-otsu.ini", CriterionKind::SklA));
  const Design d = Design::make({-1.0, -0.266, 0.721, 1.0}, {0.377, 0.198, 0.244, 0.181});
  const auto s = verify(c, d);
  EXPECT_EQ(s.verdict, Verdict::NotOptimal);
  EXPECT_GT(s.max_violation, 0.0);
  expect_invariants(s, d, {-1.0, 1.0}, 2001);
  EXPECT_LT(efficiency_bound(s, s.criterion.value), 0.1);
}

TEST(Verify, CustomGridAndTolerance) {
  const Criterion c(bundled("example-sec5-2-t.ini", CriterionKind::T));
  VerifyOptions o;
  o.grid_n = 11;
  o.tol = 0.5;
  o.polish = false;
  const Design d = Design::make({0.308, 2.044, 5.0}, {0.316, 0.428, 0.256});
  const auto s = verify(c, d, o);
  EXPECT_EQ(s.grid.size(), 11u);
  EXPECT_NEAR(s.tol, 0.5 * s.criterion.value, 1e-15);
  expect_invariants(s, d, {0.1, 5.0}, 11);
}

TEST(EfficiencyBound, Formula) {
  SensitivityReport s;
  s.max_violation = 0.0;
  EXPECT_DOUBLE_EQ(efficiency_bound(s, 2.0), 1.0);
  s.max_violation = -0.3;
  EXPECT_DOUBLE_EQ(efficiency_bound(s, 2.0), 1.0);
  s.max_violation = 2.0;
  EXPECT_DOUBLE_EQ(efficiency_bound(s, 2.0), 0.5);
  s.max_violation = 6.0;
  EXPECT_DOUBLE_EQ(efficiency_bound(s, 2.0), 0.25);
  EXPECT_THROW(efficiency_bound(s, 0.0), DomainError);
  EXPECT_FALSE(efficiency_bound_is_heuristic(CriterionKind::T));
  for (auto k : {CriterionKind::KLNormal, CriterionKind::KL, CriterionKind::SklA, CriterionKind::SklB}) {
    EXPECT_TRUE(efficiency_bound_is_heuristic(k));
  }
  EXPECT_STREQ(to_string(Verdict::Optimal), "OPTIMAL");
  EXPECT_STREQ(to_string(Verdict::NotOptimal), "NOT_OPTIMAL");
}
