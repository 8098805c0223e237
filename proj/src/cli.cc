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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dp_resample/accountant.h"
#include "dp_resample/errors.h"
#include "dp_resample/harness.h"
#include "dp_resample/mechanisms.h"
#include "dp_resample/privsub.h"

namespace dp_resample {
namespace {

struct CiArgs {
  std::string data_path;
  std::size_t m = 0;
  std::size_t num_subsamples = 50;
  double alpha = 0.1;
  double eps_total = 5.0;
  double delta = 0.0;
  double split = 0.5;
  std::string mode = "basic";
  std::string mechanism = "inverse_sensitivity_median";
  std::optional<double> range_lo;
  std::optional<double> range_hi;
  std::string tau = "sqrt";
  uint64_t seed = 0;
  std::string emit_cdf;
};

struct BudgetArgs {
  double eps_total = 5.0;
  double delta = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t num_subsamples = 50;
  double split = 0.5;
  std::string mode = "basic";
};

struct ExperimentArgs {
  std::string config_path;
  std::size_t workers = 1;
  std::string output;
};

std::vector<double> ReadDataFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(value)) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected one finite number per line");
    }
    values.push_back(value);
  }
  if (values.empty()) throw ConfigError(path + ": no data values");
  return values;
}

double ParseTau(const std::string& tau) {
  constexpr std::string_view kCustom = "custom:";
  if (tau.rfind(kCustom, 0) != 0) {
    throw ConfigError("--tau must be 'sqrt' or 'custom:<ratio>'");
  }
  const std::string ratio = tau.substr(kCustom.size());
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(ratio, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used != ratio.size() || ratio.empty()) {
    throw ConfigError("--tau custom ratio '" + ratio + "' is not a number");
  }
  return value;
}

int RunCi(const CiArgs& args, std::ostream& out, std::ostream& err) {
  const std::vector<double> data = ReadDataFile(args.data_path);
  const std::size_t n = data.size();
  const std::size_t m =
      args.m != 0 ? args.m : SizeRule::Power(2.0 / 3.0).EvaluateCount(n);
  if (m > n) {
    throw ConfigError("--m " + std::to_string(m) + " exceeds the " +
                      std::to_string(n) + " data values");
  }

  const auto [data_lo, data_hi] = std::minmax_element(data.begin(), data.end());
  if (!args.range_lo || !args.range_hi) {
    err << "warning: no --range-lo/--range-hi given; using the data minimum and "
           "maximum, which is not differentially private\n";
  }
  double lo = args.range_lo.value_or(*data_lo);
  double hi = args.range_hi.value_or(*data_hi);
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const BoundedRange range = BoundedRange::Make(lo, hi);

  const SubsamplingPlan plan =
      args.tau == "sqrt"
          ? SubsamplingPlan::WithSqrtRate(n, m, args.num_subsamples, args.alpha)
          : SubsamplingPlan::WithTauRatio(n, m, args.num_subsamples, args.alpha,
                                          ParseTau(args.tau));
  plan.Validate();
  const PrivSubBudget budgets =
      Calibrate(PrivacyBudget::Make(args.eps_total, args.delta), m, n,
                args.num_subsamples, args.split, ParseCompositionKind(args.mode));
  const Mechanism mechanism = Mechanism::FromName(args.mechanism, range);
  const SubsamplingResult result = RunPrivSub(data, plan, mechanism, budgets, args.seed);

  out << FormatDouble(result.ci.lower) << ' ' << FormatDouble(result.ci.upper) << '\n';
  if (!args.emit_cdf.empty()) {
    std::string text;
    for (double p : result.cdf.points()) text += FormatDouble(p) + '\n';
    WriteTextFile(args.emit_cdf, text);
  }
  return kExitOk;
}

int RunBudget(const BudgetArgs& args, std::ostream& out) {
  const PrivacyBudget target = PrivacyBudget::Make(args.eps_total, args.delta);
  const PrivSubBudget budgets = Calibrate(target, args.m, args.n, args.num_subsamples,
                                          args.split, ParseCompositionKind(args.mode));
  const PrivacyBudget amplified = AmplifiedPerSubsample(budgets);
  const PrivacyBudget total = PrivSubTotal(budgets);
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"eps_total", FormatDouble(args.eps_total)},
      {"delta_total", FormatDouble(args.delta)},
      {"m", std::to_string(args.m)},
      {"n", std::to_string(args.n)},
      {"T", std::to_string(args.num_subsamples)},
      {"split", FormatDouble(args.split)},
      {"mode", budgets.mode.name()},
      {"epsilon", FormatDouble(budgets.center.epsilon)},
      {"delta", FormatDouble(budgets.center.delta)},
      {"epsilon_prime", FormatDouble(budgets.per_subsample.epsilon)},
      {"delta_prime", FormatDouble(budgets.per_subsample.delta)},
      {"epsilon_amp", FormatDouble(amplified.epsilon)},
      {"delta_amp", FormatDouble(amplified.delta)},
      {"total_epsilon", FormatDouble(total.epsilon)},
      {"total_delta", FormatDouble(total.delta)},
  };
  for (const auto& [key, value] : rows) out << key << ' ' << value << '\n';
  return kExitOk;
}

ExperimentConfig LoadWithOverrides(const ExperimentArgs& args) {
  ExperimentConfig config = LoadExperimentConfig(args.config_path);
  if (const char* env = std::getenv("DP_RESAMPLE_SEED"); env != nullptr) {
    const std::string text(env);
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(text, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw ConfigError("DP_RESAMPLE_SEED must be an unsigned integer");
    }
    config.root_seed = seed;
  }
  if (!args.output.empty()) config.output_path = args.output;
  return config;
}

int RunCoverageCommand(const ExperimentArgs& args, std::ostream& out,
                       std::ostream& err) {
  const ExperimentConfig config = LoadWithOverrides(args);
  const CoverageReport report = RunCoverage(config, args.workers);
  const std::string csv = FormatCoverageCsv(report);
  if (config.output_path.empty()) {
    out << csv;
  } else {
    WriteTextFile(config.output_path, csv);
    for (const CoverageRow& r : report.rows) {
      out << r.distribution_id << ' ' << r.n << ' ' << r.method_id << ' '
          << FormatDouble(r.coverage) << ' ' << FormatDouble(r.mean_width) << ' '
          << r.status << '\n';
    }
  }
  if (report.has_errors()) {
    err << "coverage: some cells failed; see the status column\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int RunCdfCommand(const ExperimentArgs& args, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = LoadWithOverrides(args);
  const CdfReport report = RunCdfConvergence(config, args.workers);
  const std::string csv = FormatCdfCsv(report);
  if (config.output_path.empty()) {
    out << csv;
  } else {
    WriteTextFile(config.output_path, csv);
    for (const CdfRow& r : report.rows) {
      out << r.distribution_id << ' ' << r.n << ' ' << r.method_id << ' '
          << FormatDouble(r.sup_distance) << ' ' << r.status << '\n';
    }
  }
  if (!config.grid_output_path.empty()) {
    WriteTextFile(config.grid_output_path, FormatCdfGridCsv(report));
  }
  if (report.has_errors()) {
    err << "cdf: some cells failed; see the status column\n";
    return kExitRuntime;
  }
  return kExitOk;
}

void AddExperimentFlags(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--workers", args.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--output", args.output,
                  "CSV output path (overrides output_path in the config)");
}

}  // namespace

int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Differentially private confidence intervals via subsampling",
               "dp_resample"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  CiArgs ci;
  CLI::App* ci_cmd = app.add_subcommand("ci", "Private CI for the data in one file");
  ci_cmd->add_option("data", ci.data_path, "Plain-text data file, one number per line")
      ->required();
  ci_cmd->add_option("--m", ci.m, "Subsample size; 0 means ceil(n^(2/3))");
  ci_cmd->add_option("--T", ci.num_subsamples, "Number of subsamples");
  ci_cmd->add_option("--alpha", ci.alpha, "Miscoverage level");
  ci_cmd->add_option("--eps-total", ci.eps_total, "Total privacy budget epsilon");
  ci_cmd->add_option("--delta", ci.delta, "Total privacy budget delta");
  ci_cmd->add_option("--split", ci.split, "Fraction of the budget for the center");
  ci_cmd->add_option("--mode", ci.mode, "Composition: basic or advanced");
  ci_cmd->add_option("--mechanism", ci.mechanism,
                     "inverse_sensitivity_median, laplace_mean, gaussian_mean, "
                     "exact_median or exact_mean");
  ci_cmd->add_option("--range-lo", ci.range_lo, "Lower bound of the data domain");
  ci_cmd->add_option("--range-hi", ci.range_hi, "Upper bound of the data domain");
  ci_cmd->add_option("--tau", ci.tau, "Rate ratio: sqrt or custom:<ratio>");
  ci_cmd->add_option("--seed", ci.seed, "Random seed");
  ci_cmd->add_option("--emit-cdf", ci.emit_cdf,
                     "Write the scaled CDF points here, one per line");

  BudgetArgs budget;
  CLI::App* budget_cmd = app.add_subcommand("budget", "Calibrate the PrivSub budget");
  budget_cmd->add_option("--eps-total", budget.eps_total, "Total epsilon");
  budget_cmd->add_option("--delta", budget.delta, "Total delta");
  budget_cmd->add_option("--m", budget.m, "Subsample size")->required();
  budget_cmd->add_option("--n", budget.n, "Sample size")->required();
  budget_cmd->add_option("--T", budget.num_subsamples, "Number of subsamples");
  budget_cmd->add_option("--split", budget.split, "Fraction for the center");
  budget_cmd->add_option("--mode", budget.mode, "Composition: basic or advanced");

  ExperimentArgs coverage;
  CLI::App* coverage_cmd =
      app.add_subcommand("coverage", "Monte Carlo coverage and width table");
  AddExperimentFlags(coverage_cmd, coverage);

  ExperimentArgs cdf;
  CLI::App* cdf_cmd = app.add_subcommand("cdf", "Subsampling CDF convergence");
  AddExperimentFlags(cdf_cmd, cdf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (ci_cmd->parsed()) return RunCi(ci, out, err);
    if (budget_cmd->parsed()) return RunBudget(budget, out);
    if (coverage_cmd->parsed()) return RunCoverageCommand(coverage, out, err);
    return RunCdfCommand(cdf, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace dp_resample
