#include <gtest/gtest.h>

#include <string>

#include "discrimax/config.hpp"
#include "oracles.hpp"

using namespace discrimax;

namespace {

const std::string kBase = R"([design_space]
lo = 0.1
hi = 5

[model1]
mean = p1*x/(x + p2)
theta = 1, 1

[model2]
mean = p1*(1 - exp(-p2*x))
box_lo = 0.1, 0.1
box_hi = 100, 100

[criterion]
kind = T
)";

// Message and line of the ConfigError raised by text, or empty if none.
std::pair<std::string, int> error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.ini");
  } catch (const ConfigError& e) {
    return {e.what(), e.line()};
  }
  return {"", 0};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST(IniParser, SectionsKeysAndComments) {
  const auto secs = parse_ini("# lead\n[A]\nkey = 1 # tail\n; note\nOther=two words\n\n[b:Tag]\nx=1\n");
  ASSERT_EQ(secs.size(), 2u);
  EXPECT_EQ(secs[0].name, "a");
  EXPECT_EQ(secs[0].entries.at("key").value, "1");
  EXPECT_EQ(secs[0].entries.at("key").line, 3);
  EXPECT_EQ(secs[0].entries.at("other").value, "two words");
  EXPECT_EQ(secs[1].name, "b:tag");
  EXPECT_THROW(parse_ini("key = 1\n"), ConfigError);
  EXPECT_THROW(parse_ini("[a\n"), ConfigError);
  EXPECT_THROW(parse_ini("[a]\nnovalue\n"), ConfigError);
  EXPECT_THROW(parse_ini("[a]\nk=1\nk=2\n"), ConfigError);
  EXPECT_THROW(parse_ini("[a]\n[a]\n"), ConfigError);
}

TEST(Config, MinimalTConfig) {
  const auto cfg = parse_config(kBase);
  EXPECT_EQ(cfg.criterion, CriterionKind::T);
  EXPECT_EQ(cfg.space.domain.lo, 0.1);
  EXPECT_EQ(cfg.model2.theta_dim, 2);
  EXPECT_EQ(cfg.inner.starts, 16);
  EXPECT_EQ(cfg.inner.seed, 0u);
  EXPECT_EQ(cfg.optimizer.grid_n, 401);
  EXPECT_EQ(cfg.verify.grid_n, 2001);
  const Problem p = cfg.problem();
  EXPECT_FALSE(p.density1);
  EXPECT_FALSE(p.density2);
}

TEST(Config, OverridesAreRead) {
  const auto cfg = parse_config(kBase +
                                "[solver]\ndelta = 1e-6\nbeta = 20\n[inner]\nstarts = 4\nseed = 9\n"
                                "[optimizer]\ngrid_n = 101\nstop_tol = 1e-6\npolish = false\n"
                                "[verify]\ngrid_n = 501\ntol = 1e-3\n");
  EXPECT_EQ(cfg.solver.delta, 1e-6);
  EXPECT_EQ(cfg.solver.beta, 20.0);
  EXPECT_EQ(cfg.inner.starts, 4);
  EXPECT_EQ(cfg.inner.seed, 9u);
  EXPECT_EQ(cfg.optimizer.grid_n, 101);
  EXPECT_EQ(cfg.optimizer.stop_tol, 1e-6);
  EXPECT_FALSE(cfg.optimizer.polish);
  EXPECT_EQ(cfg.verify.grid_n, 501);
  EXPECT_EQ(cfg.verify.tol, 1e-3);
}

TEST(Config, DiagnosticsNameFileLineSectionAndKey) {
  {
    const auto [msg, line] = error_of(replace(kBase, "hi = 5", "hi = 0.05"));
    EXPECT_EQ(line, 3);
    EXPECT_NE(msg.find("cfg.ini:3: [design_space] hi:"), std::string::npos) << msg;
  }
  {
    const auto [msg, line] = error_of(replace(kBase, "theta = 1, 1", "theta = 1"));
    EXPECT_EQ(line, 7);
    EXPECT_NE(msg.find("[model1] theta"), std::string::npos) << msg;
  }
  {
    const auto [msg, line] = error_of(replace(kBase, "p1*x/(x + p2)", "p1*x/(x + "));
    EXPECT_EQ(line, 6);
    EXPECT_NE(msg.find("[model1] mean"), std::string::npos) << msg;
  }
  {
    const auto [msg, line] = error_of(replace(kBase, "box_hi = 100, 100", "box_hi = 100, 0.01"));
    EXPECT_EQ(line, 12);
  }
  {
    const auto [msg, line] = error_of(replace(kBase, "kind = T", "kind = D"));
    EXPECT_EQ(line, 15);
    EXPECT_NE(msg.find("[criterion] kind"), std::string::npos) << msg;
  }
  {
    const auto [msg, line] = error_of(replace(kBase, "lo = 0.1\n", "lo = 0.1\nwidth = 3\n"));
    EXPECT_EQ(line, 3);
    EXPECT_NE(msg.find("unknown key 'width'"), std::string::npos) << msg;
  }
  EXPECT_NE(error_of(kBase + "[extra]\nk = 1\n").first.find("unknown section [extra]"), std::string::npos);
  EXPECT_NE(error_of(replace(kBase, "[model2]", "[modelx]")).first, "");
  EXPECT_NE(error_of(kBase + "[inner]\nstarts = many\n").first.find("[inner] starts"), std::string::npos);
  EXPECT_NE(error_of(kBase + "[solver]\ndelta = 2\n").first.find("[solver] delta"), std::string::npos);
}

TEST(Config, ArityErrorsAreConfigErrors) {
  const auto [msg, line] = error_of(replace(kBase, "p1*(1 - exp(-p2*x))", "p1*(1 - exp(-p3*x))"));
  EXPECT_EQ(line, 10);
  EXPECT_NE(msg.find("[model2] mean"), std::string::npos) << msg;
}

TEST(Config, DensityRequirementsPerCriterion) {
  // SKL_A needs a truncated density1.
  EXPECT_NE(error_of(replace(kBase, "kind = T", "kind = SKL_A")).first, "");
  EXPECT_NE(error_of(replace(kBase, "kind = T", "kind = SKL_A") + "[density1]\nkind = lognormal\nvariance = 0.1\n")
                .first,
            "");
  EXPECT_EQ(error_of(replace(kBase, "kind = T", "kind = SKL_A") +
                     "[density1]\nkind = truncated_lognormal\nvariance = 0.1\np_lo = 0.0001\np_hi = 0.9999\n")
                .first,
            "");
  // SKL_B needs density2; KL needs both.
  EXPECT_NE(error_of(replace(kBase, "kind = T", "kind = SKL_B")).first, "");
  EXPECT_NE(error_of(replace(kBase, "kind = T", "kind = KL") + "[density1]\nkind = lognormal\nvariance = 0.1\n")
                .first,
            "");
  // Keys that do not belong to the density kind.
  EXPECT_NE(error_of(kBase + "[density1]\nkind = normal\nvariance = 1\nhalf_width = 3\n").first, "");
  EXPECT_NE(error_of(kBase + "[density1]\nkind = cauchy\nvariance = 1\n").first, "");
  // A tagged density that its criterion does not use.
  const auto cfg = parse_config(kBase + "[density1:SKL_B]\nkind = normal\nvariance = 1\n");
  EXPECT_THROW(cfg.problem(CriterionKind::SklB), ConfigError);
  EXPECT_NE(error_of(kBase + "[density1:XYZ]\nkind = normal\nvariance = 1\n").first, "");
}

TEST(Config, TaggedDensitiesAreSelectedPerCriterion) {
  const auto cfg = load_config(config_path("example-sec5-1-t.ini"));
  const Problem kl = cfg.problem(CriterionKind::KL);
  ASSERT_TRUE(kl.density1 && kl.density2);
  EXPECT_EQ(kl.density1->kind(), DensityKind::Lognormal);
  EXPECT_EQ(kl.kl_orientation, KlOrientation::Reverse);
  const Problem a = cfg.problem(CriterionKind::SklA);
  ASSERT_TRUE(a.density1);
  EXPECT_EQ(a.density1->kind(), DensityKind::TruncatedLognormal);
  EXPECT_FALSE(a.density2);
  const Problem t = cfg.problem(CriterionKind::T);
  EXPECT_FALSE(t.density1);
}

TEST(Config, BundledConfigsLoad) {
  for (const char* f : {"example-sec5-1-t.ini", "example-sec5-1-kl.ini", "example-sec5-1-skl.ini",
                        "example-sec5-2-t.ini", "example-sec5-2-kl.ini", "example-sec5-2-skl.ini",
                        "example-otsu.ini", "example-otsu-t.ini", "example-otsu-sklb.ini"}) {
    EXPECT_NO_THROW(load_config(config_path(f))) << f;
  }
  EXPECT_THROW(load_config(config_path("missing.ini")), ConfigError);
}
