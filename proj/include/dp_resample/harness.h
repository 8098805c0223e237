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

#ifndef DP_RESAMPLE_HARNESS_H_
#define DP_RESAMPLE_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dp_resample/accountant.h"
#include "dp_resample/baselines.h"
#include "dp_resample/distributions.h"
#include "dp_resample/mechanisms.h"
#include "dp_resample/privsub.h"

namespace dp_resample {

// A hyperparameter that may scale with n:
//   coefficient * n^power / log(n)^log_power.
// Parsed from a number or a short expression such as "n^2/3", "sqrt(n)",
// "0.1/sqrt(n)", "4n/log^4(n)" or "50". Counts are rounded up.
struct SizeRule {
  double coefficient = 1.0;
  double power = 0.0;
  double log_power = 0.0;

  static SizeRule Constant(double value) { return {value, 0.0, 0.0}; }
  static SizeRule Power(double power, double coefficient = 1.0) {
    return {coefficient, power, 0.0};
  }
  static SizeRule Parse(std::string_view expression);

  double Evaluate(std::size_t n) const;
  // ceil(Evaluate(n)), with a 1e-9 allowance so n^(2/3) at n=1000 is 100.
  std::size_t EvaluateCount(std::size_t n) const;
};

enum class MethodKind {
  kPrivSub,
  kNonPrivateSubsampling,
  kBootstrap,
  kSampleSplitting,
  kExpMechStyle,
  kBlbQuant,     // results merged from an externally produced CSV
  kTheoretical,  // CDF experiments only: the limit law itself
};

MethodKind ParseMethodKind(std::string_view name);
std::string_view MethodKindName(MethodKind kind);

struct MethodSpec {
  std::string id;
  MethodKind kind = MethodKind::kPrivSub;
  // Empty: inverse_sensitivity_median for median targets, laplace_mean for
  // mean targets.
  std::string mechanism;
  // Empty: the distribution's truncation bounds.
  std::optional<BoundedRange> range;
  bool clip_output = false;
  double eps_total = 5.0;
  double delta = 0.0;
  double split = 0.5;
  CompositionMode::Kind composition = CompositionMode::Kind::kBasic;
  SizeRule m = SizeRule::Power(2.0 / 3.0);
  SizeRule num_subsamples = SizeRule::Constant(50);
  SizeRule num_splits = SizeRule::Power(0.5);
  SizeRule granularity = SizeRule::Power(-0.5, 0.1);
  std::optional<double> tau_ratio;
  bool centered_bootstrap = false;
  std::string external_csv;
};

struct DistributionEntry {
  std::string id;
  DistributionSpec spec;
};

enum class Target { kMedian, kMean };
enum class DatasetPolicy { kShared, kIndependent };

struct ExperimentConfig {
  std::vector<DistributionEntry> distributions;
  std::vector<std::size_t> sample_sizes;
  std::vector<MethodSpec> methods;
  Target target = Target::kMedian;
  double alpha = 0.1;
  std::size_t replications = 300;
  uint64_t root_seed = 0;
  std::string output_path;
  // cdf only: long-format grid evaluations.
  std::string grid_output_path;
  DatasetPolicy dataset_policy = DatasetPolicy::kShared;
  std::size_t cdf_grid_points = 512;

  // Builds every (distribution, n, method) setup once; throws ConfigError on
  // the first violated invariant.
  void Validate() const;
};

// Throws ConfigError with a path-qualified message on malformed input.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Parses the tagged distribution record, e.g.
// {"kind": "truncated_normal", "mu": 0, "sigma": 2, "lo": -6, "hi": 4}.
DistributionSpec ParseDistributionSpec(std::string_view json_text);

// Ground truth for the experiment target.
double TrueTarget(const DistributionSpec& spec, Target target);

// A fully resolved method for one (distribution, n) cell.
class CellMethod {
 public:
  CellMethod(const MethodSpec& spec, const DistributionEntry& distribution,
             std::size_t n, double alpha, Target target);

  ConfidenceInterval Interval(std::span<const double> data, uint64_t seed) const;
  // Subsampling methods only.
  SubsamplingResult Subsampling(std::span<const double> data,
                                uint64_t seed) const;

  const MethodSpec& spec() const { return spec_; }
  const std::optional<SubsamplingPlan>& plan() const { return plan_; }
  const std::optional<PrivSubBudget>& budgets() const { return budgets_; }

 private:
  MethodSpec spec_;
  std::size_t n_;
  double alpha_;
  Statistic statistic_;
  BoundedRange range_;
  std::optional<Mechanism> mechanism_;
  std::optional<SubsamplingPlan> plan_;
  std::optional<PrivSubBudget> budgets_;
  std::optional<SplitPlan> split_plan_;
  std::optional<BootstrapPlan> bootstrap_plan_;
  double granularity_ = 0.0;
};

struct CoverageRow {
  std::string distribution_id;
  std::size_t n = 0;
  std::string method_id;
  std::size_t replications = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double width_stderr = 0.0;
  double coverage_stderr = 0.0;
  // "ok" or "error: <message>".
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct CoverageReport {
  std::vector<CoverageRow> rows;

  bool has_errors() const;
  const CoverageRow* Find(std::string_view distribution_id, std::size_t n,
                          std::string_view method_id) const;
};

struct CdfRow {
  std::string distribution_id;
  std::size_t n = 0;
  std::string method_id;
  double sup_distance = 0.0;
  std::vector<double> grid;
  std::vector<double> empirical;
  std::vector<double> theoretical;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct CdfReport {
  std::vector<CdfRow> rows;

  bool has_errors() const;
  const CdfRow* Find(std::string_view distribution_id, std::size_t n,
                     std::string_view method_id) const;
};

// Seeds. Datasets are shared between methods of a replication unless the
// policy is kIndependent.
uint64_t DatasetSeed(const ExperimentConfig& config,
                     std::string_view distribution_id, std::size_t n,
                     std::string_view method_id, std::size_t replication);
uint64_t MethodSeed(uint64_t root_seed, std::string_view distribution_id,
                    std::size_t n, std::string_view method_id,
                    std::size_t replication);

// Monte Carlo coverage over the full grid. Rows come out in config order
// (distribution, then n, then method) and are independent of `workers`.
CoverageReport RunCoverage(const ExperimentConfig& config,
                           std::size_t workers = 1);

// One run per (distribution, n, method): sup over an evenly spaced grid of
// |empirical CDF - LimitingCdfMedian|. The grid spans the empirical points and
// +-4 limit standard deviations.
CdfReport RunCdfConvergence(const ExperimentConfig& config,
                            std::size_t workers = 1);

// CSV: header plus one row per cell, floats as %.9g, LF line endings.
std::string FormatCoverageCsv(const CoverageReport& report);
CoverageReport ParseCoverageCsv(std::string_view text);
void WriteCoverageCsv(const CoverageReport& report, const std::string& path);
CoverageReport ReadCoverageCsv(const std::string& path);

std::string FormatCdfCsv(const CdfReport& report);
std::string FormatCdfGridCsv(const CdfReport& report);
void WriteCdfCsv(const CdfReport& report, const std::string& path);

// Shared helpers.
std::string FormatDouble(double value);
void WriteTextFile(const std::string& path, std::string_view contents);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_HARNESS_H_
