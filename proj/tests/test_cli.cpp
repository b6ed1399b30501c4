#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "discrimax/cli.hpp"
#include "oracles.hpp"

using namespace discrimax;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("discrimax-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

const char* kExpModelTilde = "-1,-0.266,0.721,1;0.377,0.198,0.244,0.181";

}  // namespace

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitConfigError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(run({"solve", config_path("example-sec5-2-t.ini")}).code, kExitConfigError);
  EXPECT_EQ(run({"verify", config_path("missing.ini"), "--design", "1;1"}).code, kExitConfigError);
}

TEST_F(Cli, InvalidDomainExitsOne) {
  std::ofstream(path("bad.ini")) << "[design_space]\nlo = 5\nhi = 0.1\n[model1]\nmean = p1*x\ntheta = 1\n"
                                    "[model2]\nmean = p1*x^2\nbox_lo = -1\nbox_hi = 1\n[criterion]\nkind = T\n";
  const CliRun r = run({"solve", path("bad.ini"), "-o", path("out.json")});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("bad.ini:3: [design_space] hi"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("out.json")));
}

TEST_F(Cli, MalformedDesignsExitOne) {
  const std::string cfg = config_path("example-sec5-2-t.ini");
  for (const char* d : {"0.5,abc;0.5,0.5", "0.5,1.0;0.5", "0.5,1.0", "0.5,1.0;0.5,0.4", "{\"points\": [1]}",
                        "{not json", "0.5,1.0;0.5,-0.5", ""}) {
    EXPECT_EQ(run({"verify", cfg, "--design", d}).code, kExitConfigError) << d;
  }
}

TEST_F(Cli, NearlyNormalisedWeightsAreRenormalisedWithAWarning) {
  const CliRun r = run({"verify", config_path("example-sec5-2-t.ini"), "--design", "0.308,2.044,5;0.316,0.428,0.2559995"});
  EXPECT_NE(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("renormalised"), std::string::npos) << r.err;
}

TEST_F(Cli, SolveVerifyRoundTripAndDeterminism) {
  const std::string cfg = config_path("example-sec5-2-t.ini");
  const CliRun a = run({"solve", cfg, "-o", path("a.json"), "--n-obs", "50"});
  ASSERT_EQ(a.code, kExitOptimal) << a.err;
  const CliRun b = run({"solve", cfg, "-o", path("b.json"), "--n-obs", "50"});
  ASSERT_EQ(b.code, kExitOptimal) << b.err;
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));

  const auto doc = nlohmann::json::parse(slurp(path("a.json")));
  for (const char* k : {"points", "weights", "criterion", "value", "theta2_star", "report", "trace", "verification",
                        "exact_design"}) {
    EXPECT_TRUE(doc.contains(k)) << k;
  }
  EXPECT_EQ(doc["criterion"], "T");
  EXPECT_EQ(doc["verification"]["verdict"], "OPTIMAL");
  EXPECT_EQ(doc["exact_design"]["n"], 50);
  EXPECT_FALSE(doc["report"]["convention"].get<std::string>().empty());
  EXPECT_EQ(doc["report"]["inner_multistart_trace"].size(), 17u);

  const CliRun v = run({"verify", cfg, "--design", path("a.json")});
  EXPECT_EQ(v.code, kExitOptimal) << v.out << v.err;
  EXPECT_NE(v.out.find("verdict: OPTIMAL"), std::string::npos);
}

TEST_F(Cli, SensitivityCsvFormat) {
  const std::string cfg = config_path("example-sec5-2-t.ini");
  const CliRun r = run({"sensitivity", cfg, "--design", "0.308,2.044,5;0.316,0.428,0.256", "--csv", path("s.csv")});
  ASSERT_EQ(r.code, kExitOptimal) << r.err;
  std::ifstream in(path("s.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 2002u);
  EXPECT_EQ(lines[0], "x,psi");
  EXPECT_EQ(lines[1].substr(0, lines[1].find(',')), "0.10000000000000001");
  EXPECT_EQ(lines.back().substr(0, lines.back().find(',')), "5");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto comma = lines[i].find(',');
    ASSERT_NE(comma, std::string::npos);
    EXPECT_EQ(lines[i].find(',', comma + 1), std::string::npos);
    EXPECT_NO_THROW((void)std::stod(lines[i].substr(comma + 1)));
  }
  // A second run writes identical bytes.
  run({"sensitivity", cfg, "--design", "0.308,2.044,5;0.316,0.428,0.256", "--csv", path("t.csv")});
  EXPECT_EQ(slurp(path("s.csv")), slurp(path("t.csv")));
}

TEST_F(Cli, EfficiencyOfIdenticalDesignsIsAllOnes) {
  const std::string cfg = config_path("example-sec5-1-t.ini");
  const std::string d = "0.508,2.992,5;0.58,0.298,0.122";
  const CliRun r = run({"efficiency", cfg, "--designs", d, d, "--criteria", "T,SKL_A", "-o", path("e.json")});
  ASSERT_EQ(r.code, kExitOptimal) << r.err;
  const auto doc = nlohmann::json::parse(slurp(path("e.json")));
  ASSERT_EQ(doc["matrix"].size(), 2u);
  for (const auto& row : doc["matrix"]) {
    for (const auto& v : row) EXPECT_DOUBLE_EQ(v.get<double>(), 1.0);
  }
  EXPECT_NE(r.err.find("no design labelled"), std::string::npos);
}

TEST_F(Cli, ExpModelDesignNotOptimalViaTheBinary) {
  const std::string cmd = std::string(DISCRIMAX_CLI_PATH) + " verify " + config_path("example-otsu.ini") +
                          " --design '" + kExpModelTilde + "' --csv " + path("o.csv") + " > " + path("log") + " 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitNotOptimal) << slurp(path("log"));
  EXPECT_NE(slurp(path("log")).find("NOT_OPTIMAL"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("o.csv")));
}
