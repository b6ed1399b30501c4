#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "discrimax/config.hpp"
#include "discrimax/equivalence.hpp"
#include "discrimax/optimizer.hpp"
#include "oracles.hpp"

using namespace discrimax;

namespace {

Problem bundled(const char* file, CriterionKind k) { return load_config(config_path(file)).problem(k); }

}  // namespace

TEST(ArgmaxSmallest, TiesGoToTheFirstIndex) {
  EXPECT_EQ(argmax_smallest({1.0, 3.0, 3.0 + 1e-13, 2.0}), 1u);
  EXPECT_EQ(argmax_smallest({1.0, 3.0, 3.1, 2.0}), 2u);
  EXPECT_EQ(argmax_smallest({5.0}), 0u);
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.grid_n = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.stop_tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.weight_floor = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RefineWeights, SinglePointGetsAllTheMass) {
  const Criterion c(bundled("example-sec5-1-t.ini", CriterionKind::T));
  const Design d = refine_weights(c, std::vector<double>{2.5});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.weights[0], 1.0);
}

TEST(RefineWeights, TableOneTSupport) {
  const Criterion c(bundled("example-sec5-1-t.ini", CriterionKind::T));
  const Design d = refine_weights(c, std::vector<double>{0.508, 2.992, 5.0});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d.weights[0], 0.580, 0.01);
  EXPECT_NEAR(d.weights[1], 0.298, 0.01);
  EXPECT_NEAR(d.weights[2], 0.122, 0.01);
  EXPECT_NEAR(std::accumulate(d.weights.begin(), d.weights.end(), 0.0), 1.0, 1e-12);
  // Equal point divergences at theta2*.
  const auto r = c.inner_minimize(d);
  for (double v : r.point_contributions) EXPECT_NEAR(v, r.value, 1e-6 * r.value);
}

TEST(SolveDesign, TableOneTDesignWithMonotoneTrace) {
  const Criterion c(bundled("example-sec5-1-t.ini", CriterionKind::T));
  const auto res = solve_design(c);
  ASSERT_EQ(res.design.size(), 3u);
  const double p[] = {0.508, 2.992, 5.0}, w[] = {0.580, 0.298, 0.122};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(res.design.points[i], p[i], 0.01);
    EXPECT_NEAR(res.design.weights[i], w[i], 0.01);
  }
  EXPECT_TRUE(res.trace.converged);
  EXPECT_FALSE(res.trace.stall_warning);
  ASSERT_FALSE(res.trace.iterations.empty());
  for (std::size_t k = 1; k < res.trace.iterations.size(); ++k) {
    EXPECT_GE(res.trace.iterations[k].value, res.trace.iterations[k - 1].value - 1e-10)
        << "record " << k << " (" << res.trace.iterations[k].event << ")";
  }
  EXPECT_EQ(res.trace.iterations.back().event, "final");
  const auto s = verify(c, res.design, res.report);
  EXPECT_EQ(s.verdict, Verdict::Optimal);
  EXPECT_LE(s.max_violation, OptimizerConfig{}.stop_tol * res.report.value);
}

TEST(SolveDesign, GridIndependence) {
  const Criterion c(bundled("example-sec5-2-t.ini", CriterionKind::T));
  OptimizerConfig coarse, fine;
  fine.grid_n = 2 * coarse.grid_n - 1;
  const auto a = solve_design(c, coarse);
  const auto b = solve_design(c, fine);
  ASSERT_EQ(a.design.size(), b.design.size());
  const double spacing = c.problem().space.domain.width() / (coarse.grid_n - 1);
  for (std::size_t i = 0; i < a.design.size(); ++i) {
    EXPECT_LT(std::abs(a.design.points[i] - b.design.points[i]), spacing);
  }
}

TEST(SolveDesign, InitialDesignIsHonoured) {
  const Criterion c(bundled("example-sec5-2-t.ini", CriterionKind::T));
  const Design start = Design::uniform({0.5, 4.0});
  const auto res = solve_design(c, {}, &start);
  EXPECT_TRUE(res.trace.converged);
  EXPECT_NEAR(res.design.points.back(), 5.0, 0.01);
}
