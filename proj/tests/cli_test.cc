// Copyright 2026 The dp_resample Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dp_resample/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dp_resample/accountant.h"
#include "dp_resample/harness.h"

namespace dp_resample {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dp_resample");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = Dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string WriteTemp(const std::string& name, const std::string& contents) {
  const std::string path =
      (std::filesystem::temp_directory_path() / ("dp_resample_cli_" + name)).string();
  std::ofstream(path) << contents;
  return path;
}

std::string ValueOf(const std::string& table, const std::string& key) {
  std::istringstream in(table);
  std::string k, v;
  while (in >> k >> v) {
    if (k == key) return v;
  }
  return "";
}

TEST(CliTest, BudgetTable) {
  const Result r = Invoke({"budget", "--eps-total", "5", "--m", "292", "--n", "5000",
                        "--T", "50", "--split", "0.5", "--mode", "basic"});
  ASSERT_EQ(r.code, 0) << r.err;
  const PrivSubBudget b =
      Calibrate({5.0, 0.0}, 292, 5000, 50, 0.5, CompositionMode::Kind::kBasic);
  EXPECT_EQ(ValueOf(r.out, "epsilon"), "2.5");
  EXPECT_EQ(ValueOf(r.out, "epsilon_prime"), FormatDouble(b.per_subsample.epsilon));
  EXPECT_EQ(ValueOf(r.out, "epsilon_amp"), FormatDouble(AmplifiedPerSubsample(b).epsilon));
  EXPECT_EQ(ValueOf(r.out, "total_epsilon"), "5");
  EXPECT_EQ(ValueOf(r.out, "mode"), "basic");
}

TEST(CliTest, BudgetAdvancedNeedsDelta) {
  EXPECT_EQ(Invoke({"budget", "--m", "292", "--n", "5000", "--mode", "advanced"}).code,
            kExitRuntime);
  const Result ok = Invoke({"budget", "--m", "292", "--n", "5000", "--mode", "advanced",
                         "--delta", "1e-6"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ValueOf(ok.out, "total_delta"), "1e-06");
}

TEST(CliTest, UsageErrors) {
  const Result missing = Invoke({"coverage"});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("--config"), std::string::npos);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"budget", "--m", "2", "--n", "5", "--bogus", "1"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
}

TEST(CliTest, HelpShowsDefaults) {
  const Result r = Invoke({"ci", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--T"), std::string::npos);
  EXPECT_NE(r.out.find("50"), std::string::npos);
  EXPECT_NE(r.out.find("0.1"), std::string::npos);
  EXPECT_NE(r.out.find("0.5"), std::string::npos);
  EXPECT_NE(r.out.find("n^(2/3)"), std::string::npos);
}

TEST(CliTest, CiOnTinyFile) {
  const std::string data = WriteTemp("tiny.txt", "1.5\n-0.25\n3\n");
  const Result r = Invoke({"ci", data, "--T", "50", "--alpha", "0.1", "--m", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  double lo = 0, hi = 0;
  ASSERT_TRUE(in >> lo >> hi);
  EXPECT_LE(lo, hi);
  std::string rest;
  EXPECT_FALSE(in >> rest);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CiCliTest, EmitsCdfAndIsSeeded) {
  std::string values;
  for (int i = 0; i < 400; ++i) values += std::to_string((i * 37 % 101) / 10.0 - 5) + "\n";
  const std::string data = WriteTemp("data.txt", values);
  const std::string cdf = WriteTemp("cdf.txt", "");
  const std::vector<std::string> base = {"ci", data, "--range-lo", "-6", "--range-hi",
                                         "6", "--seed", "4"};
  std::vector<std::string> with_cdf = base;
  with_cdf.insert(with_cdf.end(), {"--emit-cdf", cdf});
  const Result a = Invoke(with_cdf);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(a.err.empty());
  EXPECT_EQ(Invoke(base).out, a.out);
  std::ifstream in(cdf);
  int lines = 0;
  double previous = -HUGE_VAL, x = 0;
  while (in >> x) {
    EXPECT_GE(x, previous);
    previous = x;
    ++lines;
  }
  EXPECT_EQ(lines, 50);
  std::vector<std::string> other = base;
  other[7] = "5";
  EXPECT_NE(Invoke(other).out, a.out);
  std::vector<std::string> custom = base;
  custom.insert(custom.end(), {"--tau", "custom:0.2", "--mechanism", "exact_median"});
  EXPECT_EQ(Invoke(custom).code, 0);
  custom.back() = "nonsense";
  EXPECT_EQ(Invoke(custom).code, kExitRuntime);
}

TEST(CiCliTest, BadInputs) {
  EXPECT_EQ(Invoke({"ci", WriteTemp("bad.txt", "1\nx\n")}).code, kExitConfig);
  EXPECT_EQ(Invoke({"ci", WriteTemp("empty.txt", "")}).code, kExitConfig);
  EXPECT_EQ(Invoke({"ci", WriteTemp("few.txt", "1\n2\n"), "--m", "3"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"ci", WriteTemp("t.txt", "1\n2\n"), "--tau", "fast"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"ci", "/nonexistent/data.txt"}).code, kExitRuntime);
}

const char* kConfig = R"({
  "distributions": [{"id": "normal", "kind": "truncated_normal", "mu": 0, "sigma": 2,
                     "lo": -6, "hi": 4}],
  "sample_sizes": [400], "replications": 4, "root_seed": 3,
  "methods": [{"id": "privsub", "method": "privsub"}, {"id": "boot", "method": "bootstrap"}]
})";

TEST(ExperimentCliTest, CoverageToStdoutAndFile) {
  const std::string config = WriteTemp("config.json", kConfig);
  const Result r = Invoke({"coverage", "--config", config, "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, FormatCoverageCsv(RunCoverage(LoadExperimentConfig(config))));

  const std::string output = WriteTemp("cov.csv", "");
  const Result f = Invoke({"coverage", "--config", config, "--output", output});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(FormatCoverageCsv(ReadCoverageCsv(output)), r.out);
}

TEST(ExperimentCliTest, SeedOverrideFromEnvironment) {
  const std::string config = WriteTemp("config_seed.json", kConfig);
  const std::string base = Invoke({"coverage", "--config", config}).out;
  ::setenv("DP_RESAMPLE_SEED", "3", 1);
  const std::string same = Invoke({"coverage", "--config", config}).out;
  ::setenv("DP_RESAMPLE_SEED", "999", 1);
  const std::string changed = Invoke({"coverage", "--config", config}).out;
  ::setenv("DP_RESAMPLE_SEED", "abc", 1);
  const int bad = Invoke({"coverage", "--config", config}).code;
  ::unsetenv("DP_RESAMPLE_SEED");
  EXPECT_EQ(base, same);
  EXPECT_NE(base, changed);
  EXPECT_EQ(bad, kExitConfig);
}

TEST(ExperimentCliTest, ConfigAndRowErrors) {
  EXPECT_EQ(Invoke({"coverage", "--config", WriteTemp("broken.json", "{\"x\": 1}")}).code,
            kExitConfig);
  const std::string with_theory = WriteTemp("theory.json", R"({
    "distributions": [{"kind": "truncated_normal", "mu": 0, "sigma": 2, "lo": -6, "hi": 4}],
    "sample_sizes": [400], "replications": 2,
    "methods": [{"method": "bootstrap"}, {"method": "theoretical"}]})");
  const Result r = Invoke({"coverage", "--config", with_theory});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.out.find("error: "), std::string::npos);
  const Result cdf = Invoke({"cdf", "--config", with_theory});
  EXPECT_EQ(cdf.code, kExitRuntime);
}

TEST(ExperimentCliTest, CdfWritesSummaryAndGrid) {
  const std::string grid = WriteTemp("grid.csv", "");
  const std::string config = WriteTemp("cdf.json", std::string(R"({
    "distributions": [{"id": "normal", "kind": "truncated_normal", "mu": 0, "sigma": 2,
                       "lo": -6, "hi": 4}],
    "sample_sizes": [1000], "cdf_grid_points": 16, "grid_output_path": ")") + grid + R"(",
    "methods": [{"method": "privsub", "eps_total": 2}, {"method": "theoretical"}]})");
  const Result r = Invoke({"cdf", "--config", config});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("distribution_id,n,method_id,sup_distance,status\n", 0), 0u);
  std::ifstream in(grid);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 2 * 16);
}

}  // namespace
}  // namespace dp_resample
