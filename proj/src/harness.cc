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

#include "dp_resample/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>

#include "dp_resample/baselines.h"
#include "dp_resample/errors.h"

namespace dp_resample {
namespace {

enum SeedTag : uint64_t {
  kDatasetTag = 101,
  kMethodTag = 102,
};

Statistic StatisticFor(Target target) {
  return target == Target::kMedian ? Statistic::kMedian : Statistic::kMean;
}

std::string Sanitize(std::string message) {
  for (char& c : message) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return message;
}

std::string ErrorStatus(const std::string& message) {
  return "error: " + Sanitize(message);
}

// Runs fn(task) for task in [0, count) on `workers` threads. Each task writes
// only its own output slot, so results do not depend on scheduling.
template <class Fn>
void ParallelFor(std::size_t count, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

struct CellKey {
  const DistributionEntry* distribution;
  std::size_t n;
  const MethodSpec* method;
};

std::vector<CellKey> EnumerateCells(const ExperimentConfig& config) {
  std::vector<CellKey> cells;
  for (const DistributionEntry& d : config.distributions) {
    for (std::size_t n : config.sample_sizes) {
      for (const MethodSpec& m : config.methods) cells.push_back({&d, n, &m});
    }
  }
  return cells;
}

std::vector<double> DrawDataset(const ExperimentConfig& config,
                                const CellKey& cell, std::size_t replication) {
  Rng rng(DatasetSeed(config, cell.distribution->id, cell.n, cell.method->id,
                      replication));
  return SampleValues(cell.distribution->spec, cell.n, rng);
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double ParseCsvDouble(const std::string& field) {
  if (field == "nan" || field == "-nan") return std::nan("");
  if (field == "inf") return HUGE_VAL;
  if (field == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  const double value = std::stod(field, &used);
  if (used != field.size()) throw std::invalid_argument(field);
  return value;
}

std::size_t ParseCsvCount(const std::string& field) {
  std::size_t used = 0;
  const unsigned long long value = std::stoull(field, &used);
  if (used != field.size()) throw std::invalid_argument(field);
  return static_cast<std::size_t>(value);
}

constexpr std::string_view kCoverageHeader =
    "distribution_id,n,method_id,replications,coverage,mean_width,"
    "width_stderr,coverage_stderr,status";
constexpr std::string_view kCdfHeader =
    "distribution_id,n,method_id,sup_distance,status";
constexpr std::string_view kCdfGridHeader =
    "distribution_id,n,method_id,x,empirical_cdf,theoretical_cdf";

}  // namespace

double TrueTarget(const DistributionSpec& spec, Target target) {
  return target == Target::kMedian ? TrueQuantile(spec, 0.5) : TrueMean(spec);
}

uint64_t DatasetSeed(const ExperimentConfig& config,
                     std::string_view distribution_id, std::size_t n,
                     std::string_view method_id, std::size_t replication) {
  const uint64_t method_part = config.dataset_policy == DatasetPolicy::kShared
                                   ? 0
                                   : HashString(method_id);
  return DeriveSeed(config.root_seed, {kDatasetTag, HashString(distribution_id),
                                       n, method_part, replication});
}

uint64_t MethodSeed(uint64_t root_seed, std::string_view distribution_id,
                    std::size_t n, std::string_view method_id,
                    std::size_t replication) {
  return DeriveSeed(root_seed, {kMethodTag, HashString(distribution_id), n,
                                HashString(method_id), replication});
}

CellMethod::CellMethod(const MethodSpec& spec,
                       const DistributionEntry& distribution, std::size_t n,
                       double alpha, Target target)
    : spec_(spec),
      n_(n),
      alpha_(alpha),
      statistic_(StatisticFor(target)),
      range_(spec.range.value_or(
          BoundedRange::Make(distribution.spec.lo(), distribution.spec.hi()))) {
  const std::string mechanism_name =
      !spec.mechanism.empty()
          ? spec.mechanism
          : (target == Target::kMedian ? "inverse_sensitivity_median"
                                       : "laplace_mean");
  auto make_plan = [&](std::size_t m, std::size_t count) {
    if (m > n) {
      throw PlanError("subsample size m=" + std::to_string(m) + " exceeds n=" +
                      std::to_string(n));
    }
    return spec.tau_ratio
               ? SubsamplingPlan::WithTauRatio(n, m, count, alpha, *spec.tau_ratio)
               : SubsamplingPlan::WithSqrtRate(n, m, count, alpha);
  };

  switch (spec.kind) {
    case MethodKind::kPrivSub: {
      const std::size_t m = spec.m.EvaluateCount(n);
      const std::size_t count = spec.num_subsamples.EvaluateCount(n);
      plan_ = make_plan(m, count);
      budgets_ = Calibrate(PrivacyBudget::Make(spec.eps_total, spec.delta), m, n,
                           count, spec.split, spec.composition);
      mechanism_ = Mechanism::FromName(mechanism_name, range_, spec.clip_output);
      break;
    }
    case MethodKind::kNonPrivateSubsampling:
      plan_ = make_plan(spec.m.EvaluateCount(n),
                        spec.num_subsamples.EvaluateCount(n));
      break;
    case MethodKind::kBootstrap:
      if (n < 2) throw PlanError("bootstrap needs n >= 2");
      bootstrap_plan_ = BootstrapPlan::ForSampleSize(n, alpha, spec.centered_bootstrap);
      break;
    case MethodKind::kSampleSplitting: {
      SplitPlan plan = SplitPlan::ForData(n, spec.num_splits.EvaluateCount(n), alpha);
      if (spec.tau_ratio) plan.tau_ratio = *spec.tau_ratio;
      plan.Validate(n);
      split_plan_ = plan;
      mechanism_ = Mechanism::FromName(mechanism_name, range_, spec.clip_output);
      PrivacyBudget::Make(spec.eps_total, spec.delta);
      if (!(spec.split > 0.0 && spec.split < 1.0)) {
        throw ParameterError("budget split must lie in (0, 1)");
      }
      break;
    }
    case MethodKind::kExpMechStyle:
      if (target != Target::kMedian) {
        throw ConfigError("expmech_style only supports the median target");
      }
      granularity_ = spec.granularity.Evaluate(n);
      if (!(granularity_ > 0.0)) throw ParameterError("granularity must be positive");
      if (!(spec.eps_total > 0.0)) throw ParameterError("expmech_style needs eps_total > 0");
      MedianRankBounds(n, alpha);
      break;
    case MethodKind::kBlbQuant:
    case MethodKind::kTheoretical:
      break;
  }
}

ConfidenceInterval CellMethod::Interval(std::span<const double> data,
                                        uint64_t seed) const {
  switch (spec_.kind) {
    case MethodKind::kPrivSub:
    case MethodKind::kNonPrivateSubsampling:
      return Subsampling(data, seed).ci;
    case MethodKind::kBootstrap:
      return BootstrapCi(data, statistic_, *bootstrap_plan_, seed);
    case MethodKind::kSampleSplitting:
      return SampleSplittingCi(data, *split_plan_, *mechanism_,
                               PrivacyBudget{spec_.eps_total, spec_.delta}, seed,
                               spec_.split);
    case MethodKind::kExpMechStyle:
      return ExpMechMedianCi(data, range_, PrivacyBudget{spec_.eps_total, spec_.delta},
                             alpha_, granularity_, seed);
    case MethodKind::kBlbQuant:
      throw Error("blbquant intervals are not computed here; results are merged "
                  "from its external CSV");
    case MethodKind::kTheoretical:
      throw Error("the theoretical method has no interval");
  }
  throw Error("unhandled method");
}

SubsamplingResult CellMethod::Subsampling(std::span<const double> data,
                                          uint64_t seed) const {
  if (spec_.kind == MethodKind::kPrivSub) {
    return RunPrivSub(data, *plan_, *mechanism_, *budgets_, seed);
  }
  if (spec_.kind == MethodKind::kNonPrivateSubsampling) {
    return RunNonPrivateSubsampling(data, *plan_, statistic_, seed);
  }
  throw Error("method '" + spec_.id + "' does not produce a subsampling CDF");
}

bool CoverageReport::has_errors() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const CoverageRow& r) { return !r.ok(); });
}

const CoverageRow* CoverageReport::Find(std::string_view distribution_id,
                                        std::size_t n,
                                        std::string_view method_id) const {
  for (const CoverageRow& r : rows) {
    if (r.distribution_id == distribution_id && r.n == n && r.method_id == method_id) {
      return &r;
    }
  }
  return nullptr;
}

bool CdfReport::has_errors() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const CdfRow& r) { return !r.ok(); });
}

const CdfRow* CdfReport::Find(std::string_view distribution_id, std::size_t n,
                              std::string_view method_id) const {
  for (const CdfRow& r : rows) {
    if (r.distribution_id == distribution_id && r.n == n && r.method_id == method_id) {
      return &r;
    }
  }
  return nullptr;
}

CoverageReport RunCoverage(const ExperimentConfig& config, std::size_t workers) {
  const std::vector<CellKey> cells = EnumerateCells(config);
  const std::size_t reps = config.replications;

  // Per-cell setup; a failure here turns the whole cell into an error row.
  std::vector<std::optional<CellMethod>> methods(cells.size());
  std::vector<std::string> setup_errors(cells.size());
  std::vector<double> targets(cells.size(), 0.0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    try {
      targets[c] = TrueTarget(cells[c].distribution->spec, config.target);
      if (cells[c].method->kind == MethodKind::kTheoretical) {
        throw Error("the theoretical method only applies to cdf experiments");
      }
      if (cells[c].method->kind != MethodKind::kBlbQuant) {
        methods[c].emplace(*cells[c].method, *cells[c].distribution, cells[c].n,
                           config.alpha, config.target);
      }
    } catch (const std::exception& e) {
      setup_errors[c] = e.what();
    }
  }

  struct Outcome {
    bool covered = false;
    double width = 0.0;
    std::string error;
  };
  std::vector<Outcome> outcomes(cells.size() * reps);
  ParallelFor(outcomes.size(), workers, [&](std::size_t task) {
    const std::size_t c = task / reps;
    const std::size_t r = task % reps;
    if (!methods[c]) return;
    Outcome& out = outcomes[task];
    try {
      const std::vector<double> data = DrawDataset(config, cells[c], r);
      const ConfidenceInterval ci = methods[c]->Interval(
          data, MethodSeed(config.root_seed, cells[c].distribution->id, cells[c].n,
                           cells[c].method->id, r));
      out.covered = ci.Contains(targets[c]);
      out.width = ci.width();
    } catch (const std::exception& e) {
      out.error = e.what();
      if (out.error.empty()) out.error = "unknown failure";
    }
  });

  std::map<std::string, CoverageReport> external;
  CoverageReport report;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CoverageRow row;
    row.distribution_id = cells[c].distribution->id;
    row.n = cells[c].n;
    row.method_id = cells[c].method->id;
    row.replications = reps;

    if (cells[c].method->kind == MethodKind::kBlbQuant && setup_errors[c].empty()) {
      const std::string& path = cells[c].method->external_csv;
      try {
        if (!external.count(path)) external.emplace(path, ReadCoverageCsv(path));
        const CoverageRow* found =
            external.at(path).Find(row.distribution_id, row.n, row.method_id);
        if (found == nullptr) throw Error("no row for this cell in " + path);
        row = *found;
      } catch (const std::exception& e) {
        row.status = ErrorStatus(e.what());
        row.coverage = row.mean_width = row.width_stderr = row.coverage_stderr =
            std::nan("");
      }
      report.rows.push_back(row);
      continue;
    }

    std::string error = setup_errors[c];
    for (std::size_t r = 0; r < reps && error.empty() && methods[c]; ++r) {
      error = outcomes[c * reps + r].error;
    }
    if (!error.empty()) {
      row.status = ErrorStatus(error);
      row.coverage = row.mean_width = row.width_stderr = row.coverage_stderr =
          std::nan("");
      report.rows.push_back(row);
      continue;
    }
    double covered = 0.0;
    double width_sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Outcome& o = outcomes[c * reps + r];
      covered += o.covered ? 1.0 : 0.0;
      width_sum += o.width;
    }
    const double count = static_cast<double>(reps);
    row.coverage = covered / count;
    row.mean_width = width_sum / count;
    double squares = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = outcomes[c * reps + r].width - row.mean_width;
      squares += d * d;
    }
    row.width_stderr = reps > 1 ? std::sqrt(squares / (count - 1.0)) / std::sqrt(count)
                                : 0.0;
    row.coverage_stderr = std::sqrt(row.coverage * (1.0 - row.coverage) / count);
    report.rows.push_back(row);
  }
  return report;
}

CdfReport RunCdfConvergence(const ExperimentConfig& config, std::size_t workers) {
  const std::vector<CellKey> cells = EnumerateCells(config);
  std::vector<CdfRow> rows(cells.size());
  ParallelFor(cells.size(), workers, [&](std::size_t c) {
    const CellKey& cell = cells[c];
    CdfRow& row = rows[c];
    row.distribution_id = cell.distribution->id;
    row.n = cell.n;
    row.method_id = cell.method->id;
    try {
      if (config.target != Target::kMedian) {
        throw Error("cdf convergence needs the median target (known limit law)");
      }
      const DistributionSpec& spec = cell.distribution->spec;
      const double sd = LimitingSdMedian(spec);
      std::vector<double> points;
      const bool theoretical = cell.method->kind == MethodKind::kTheoretical;
      if (!theoretical) {
        const CellMethod method(*cell.method, *cell.distribution, cell.n,
                                config.alpha, config.target);
        const std::vector<double> data = DrawDataset(config, cell, 0);
        points = method
                     .Subsampling(data, MethodSeed(config.root_seed, row.distribution_id,
                                                   row.n, row.method_id, 0))
                     .cdf.points();
      }
      const EmpiricalCdf empirical(points);
      double lo = -4.0 * sd;
      double hi = 4.0 * sd;
      if (!points.empty()) {
        lo = std::min(lo, empirical.points().front());
        hi = std::max(hi, empirical.points().back());
      }
      const std::size_t k = config.cdf_grid_points;
      row.grid.resize(k);
      row.empirical.resize(k);
      row.theoretical.resize(k);
      row.sup_distance = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) /
                                  static_cast<double>(k - 1);
        row.grid[i] = x;
        row.theoretical[i] = LimitingCdfMedian(spec, x);
        row.empirical[i] = theoretical ? row.theoretical[i] : empirical.Evaluate(x);
        row.sup_distance =
            std::max(row.sup_distance, std::abs(row.empirical[i] - row.theoretical[i]));
      }
    } catch (const std::exception& e) {
      row.status = ErrorStatus(e.what());
      row.sup_distance = std::nan("");
      row.grid.clear();
      row.empirical.clear();
      row.theoretical.clear();
    }
  });
  return CdfReport{std::move(rows)};
}

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

std::string FormatCoverageCsv(const CoverageReport& report) {
  std::string out(kCoverageHeader);
  out += '\n';
  for (const CoverageRow& r : report.rows) {
    out += r.distribution_id + ',' + std::to_string(r.n) + ',' + r.method_id + ',' +
           std::to_string(r.replications) + ',' + FormatDouble(r.coverage) + ',' +
           FormatDouble(r.mean_width) + ',' + FormatDouble(r.width_stderr) + ',' +
           FormatDouble(r.coverage_stderr) + ',' + Sanitize(r.status) + '\n';
  }
  return out;
}

CoverageReport ParseCoverageCsv(std::string_view text) {
  CoverageReport report;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCoverageHeader) {
        throw Error("coverage CSV: unexpected header '" + std::string(line) + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 9) {
      throw Error("coverage CSV line " + std::to_string(line_no) + ": expected 9 fields");
    }
    try {
      CoverageRow row;
      row.distribution_id = f[0];
      row.n = ParseCsvCount(f[1]);
      row.method_id = f[2];
      row.replications = ParseCsvCount(f[3]);
      row.coverage = ParseCsvDouble(f[4]);
      row.mean_width = ParseCsvDouble(f[5]);
      row.width_stderr = ParseCsvDouble(f[6]);
      row.coverage_stderr = ParseCsvDouble(f[7]);
      row.status = f[8];
      report.rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw Error("coverage CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  if (line_no == 0) throw Error("coverage CSV: missing header");
  return report;
}

void WriteTextFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void WriteCoverageCsv(const CoverageReport& report, const std::string& path) {
  WriteTextFile(path, FormatCoverageCsv(report));
}

CoverageReport ReadCoverageCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseCoverageCsv(buffer.str());
  } catch (const Error& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string FormatCdfCsv(const CdfReport& report) {
  std::string out(kCdfHeader);
  out += '\n';
  for (const CdfRow& r : report.rows) {
    out += r.distribution_id + ',' + std::to_string(r.n) + ',' + r.method_id + ',' +
           FormatDouble(r.sup_distance) + ',' + Sanitize(r.status) + '\n';
  }
  return out;
}

std::string FormatCdfGridCsv(const CdfReport& report) {
  std::string out(kCdfGridHeader);
  out += '\n';
  for (const CdfRow& r : report.rows) {
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      out += r.distribution_id + ',' + std::to_string(r.n) + ',' + r.method_id +
             ',' + FormatDouble(r.grid[i]) + ',' + FormatDouble(r.empirical[i]) +
             ',' + FormatDouble(r.theoretical[i]) + '\n';
    }
  }
  return out;
}

void WriteCdfCsv(const CdfReport& report, const std::string& path) {
  WriteTextFile(path, FormatCdfCsv(report));
}

}  // namespace dp_resample
