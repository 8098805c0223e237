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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dp_resample/accountant.h"
#include "dp_resample/baselines.h"
#include "dp_resample/distributions.h"
#include "dp_resample/harness.h"
#include "dp_resample/mechanisms.h"
#include "dp_resample/privsub.h"
#include "dp_resample/rng.h"

namespace dp_resample {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;
using Clock = std::chrono::steady_clock;

constexpr uint64_t kRootSeed = 20260601;
constexpr std::size_t kWorkers = 8;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string Fmt(const char* format, double a) {
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), format, a);
  return buffer;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double RelErr(double got, const Big& want) {
  if (want == 0) return std::abs(got);
  return static_cast<double>(abs((Big(got) - want) / want));
}

Big BigAmplify(double eps, std::size_t m, std::size_t n) {
  if (m == n) return Big(eps);
  return log(1 + Big(m) / Big(n) * (exp(Big(eps)) - 1));
}

Big BigAdvanced(const Big& eps, std::size_t k, double slack) {
  return eps * (sqrt(2 * Big(k) * log(1 / Big(slack))) +
                Big(k) * (exp(eps) - 1) / (exp(eps) + 1));
}

Outcome AccountantExactness() {
  const Clock::time_point start = Clock::now();
  Rng rng(DeriveSeed(kRootSeed, {1}));
  double worst = 0.0;
  double worst_round_trip = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double eps = 1e-3 + 4.0 * rng.Uniform();
    const double delta = 1e-5 * rng.Uniform();
    const double center = 3.0 * rng.Uniform();
    const std::size_t n = 2 + rng.UniformInt(100000);
    const std::size_t m = 1 + rng.UniformInt(n);
    const std::size_t k = 1 + rng.UniformInt(1000);
    const double slack = std::pow(10.0, -2.0 - 7.0 * rng.Uniform());

    const Big amp = BigAmplify(eps, m, n);
    worst = std::max(worst, RelErr(Amplify({eps, delta}, m, n).epsilon, amp));
    worst = std::max(worst, RelErr(ComposeBasic({eps, delta}, k).epsilon, Big(k) * Big(eps)));
    const Big basic_delta = Big(k) * Big(delta);
    worst = std::max(worst, RelErr(ComposeBasic({eps, delta}, k).delta,
                                   basic_delta > 1 ? Big(1) : basic_delta));
    worst = std::max(worst, RelErr(ComposeAdvanced({eps, delta}, k, slack).epsilon,
                                   BigAdvanced(Big(eps), k, slack)));

    PrivSubBudget b{{center, delta}, {eps, delta}, m, n, k, CompositionMode::Basic()};
    worst = std::max(worst, RelErr(PrivSubTotal(b).epsilon, Big(k) * amp + Big(center)));
    const Big amp_delta = m == n ? Big(delta) : Big(m) / Big(n) * Big(delta);
    worst = std::max(worst, RelErr(PrivSubTotal(b).delta, Big(k) * amp_delta + Big(delta)));
    b.mode = CompositionMode::Advanced(slack);
    worst = std::max(worst, RelErr(PrivSubTotal(b).epsilon,
                                   BigAdvanced(amp, k, slack) + Big(center)));
    worst = std::max(worst, RelErr(PrivSubTotal(b).delta,
                                   Big(k) * amp_delta + Big(slack) + Big(delta)));

    const bool advanced = i % 2 == 1;
    const PrivacyBudget target{0.1 + 9.9 * rng.Uniform(), advanced ? 1e-6 : 0.0};
    const PrivSubBudget calibrated =
        Calibrate(target, m, n, k, 0.1 + 0.8 * rng.Uniform(),
                  advanced ? CompositionMode::Kind::kAdvanced : CompositionMode::Kind::kBasic);
    const PrivacyBudget total = PrivSubTotal(calibrated);
    worst_round_trip = std::max(
        worst_round_trip, std::abs(total.epsilon - target.epsilon) / target.epsilon);
    if (advanced) {
      worst_round_trip = std::max(
          worst_round_trip, std::abs(total.delta - target.delta) / target.delta);
    }
  }
  const double elapsed = Seconds(start);
  return {worst <= 1e-12 && worst_round_trip <= 1e-9 && elapsed < 1.0,
          "max rel err " + Fmt("%.3g", worst) + " (tol 1e-12), calibrate round trip " +
              Fmt("%.3g", worst_round_trip) + " (tol 1e-9), " + Fmt("%.2f", elapsed) + " s"};
}

Outcome MechanismDistributions() {
  const Clock::time_point start = Clock::now();
  constexpr int kDraws = 1000000;
  const BoundedRange unit = BoundedRange::Make(0, 1);

  const std::vector<double> laplace_data(1000, 0.5);
  const double b = GlobalSensitivityMean(unit, 1000) / 1.0;
  Rng laplace_rng(DeriveSeed(kRootSeed, {2, 1}));
  double sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double noise = LaplaceMean(laplace_data, unit, {1.0, 0.0}, laplace_rng) - 0.5;
    sum_sq += noise * noise;
  }
  const double laplace_ratio = sum_sq / kDraws / (2 * b * b);

  const std::vector<double> gauss_data(100, 0.25);
  const PrivacyBudget gauss_budget{0.5, 1e-5};
  const double sigma = GaussianSigma(GlobalSensitivityMean(unit, 100), gauss_budget);
  Rng gauss_rng(DeriveSeed(kRootSeed, {2, 2}));
  sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double noise = GaussianMean(gauss_data, unit, gauss_budget, gauss_rng) - 0.25;
    sum_sq += noise * noise;
  }
  const double gauss_ratio = sum_sq / kDraws / (sigma * sigma);

  const std::vector<double> five = {1, 2, 3, 4, 5};
  const BoundedRange range = BoundedRange::Make(0, 6);
  const double eps = 2.0;
  std::vector<double> weight(6);
  double total = 0.0;
  for (int k = 0; k < 6; ++k) {
    // Brute-force len at the piece midpoint: points strictly between t and
    // the median 3, plus the median itself.
    const double t = k + 0.5;
    int len = 0;
    for (double x : five) len += (t < 3 && x > t && x <= 3) || (t > 3 && x >= 3 && x < t);
    weight[k] = std::exp(-eps / 2 * len);
    total += weight[k];
  }
  constexpr int kPieceDraws = 100000;
  std::vector<int> counts(6, 0);
  Rng piece_rng(DeriveSeed(kRootSeed, {2, 3}));
  for (int i = 0; i < kPieceDraws; ++i) {
    const double y = InverseSensitivityMedian(five, range, {eps, 0.0}, piece_rng);
    ++counts[std::clamp(static_cast<int>(std::floor(y)), 0, 5)];
  }
  double worst_z = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double p = weight[k] / total;
    const double se = std::sqrt(p * (1 - p) / kPieceDraws);
    worst_z = std::max(worst_z, std::abs(counts[k] / double(kPieceDraws) - p) / se);
  }
  const double elapsed = Seconds(start);
  const bool pass = std::abs(laplace_ratio - 1) <= 0.05 && std::abs(gauss_ratio - 1) <= 0.05 &&
                    worst_z <= 4.0 && elapsed < 30.0;
  return {pass, "laplace var/2b^2 " + Fmt("%.4f", laplace_ratio) + ", gaussian var/sigma^2 " +
                    Fmt("%.4f", gauss_ratio) + " (tol 5%), worst piece z " +
                    Fmt("%.2f", worst_z) + " (tol 4), " + Fmt("%.1f", elapsed) + " s"};
}

Outcome InverseSensitivityUtility() {
  const DistributionSpec spec = DistributionSpec::TruncatedNormal(0, 2, -6, 4);
  const BoundedRange range = BoundedRange::Make(-6, 4);
  Rng data_rng(DeriveSeed(kRootSeed, {3, 0}));
  const std::vector<double> data = SampleValues(spec, 201, data_rng);
  const std::size_t pieces = InverseSensitivityPieces(data, range).size();
  constexpr int kDraws = 100000;
  bool pass = true;
  std::string detail = "K=" + std::to_string(pieces);
  int stream = 1;
  for (double eps : {0.5, 2.0}) {
    Rng rng(DeriveSeed(kRootSeed, {3, static_cast<uint64_t>(stream++)}));
    std::vector<std::size_t> lens(kDraws);
    for (std::size_t& len : lens) {
      len = PathLengthMedian(data, InverseSensitivityMedian(data, range, {eps, 0.0}, rng));
    }
    for (double beta : {0.1, 0.01}) {
      const double bound = 2.0 / eps * std::log(pieces / beta);
      const double frac =
          std::count_if(lens.begin(), lens.end(), [&](std::size_t l) { return l < bound; }) /
          static_cast<double>(kDraws);
      const double floor = 1 - beta - 3 * std::sqrt(beta * (1 - beta) / kDraws);
      pass = pass && frac >= floor;
      detail += ", eps=" + Fmt("%g", eps) + " beta=" + Fmt("%g", beta) + ": " +
                Fmt("%.4f", frac) + " >= " + Fmt("%.4f", floor);
    }
  }
  return {pass, detail};
}

Outcome AlgorithmArithmetic() {
  Rng rng(DeriveSeed(kRootSeed, {4}));
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 0.01 + 0.6 * rng.Uniform();
    const std::size_t t = MinSubsamples(alpha) + rng.UniformInt(200);
    const double ratio = 0.01 + 0.99 * rng.Uniform();
    EstimateSet es{rng.StandardNormal(), {}};
    for (std::size_t k = 0; k < t; ++k) es.estimates.push_back(3 * rng.StandardNormal());
    std::vector<double> sorted = es.estimates;
    std::sort(sorted.begin(), sorted.end());
    es.estimates = sorted;

    // Direct index formula with clamping into [1, T].
    const double td = static_cast<double>(t);
    std::size_t kl = static_cast<std::size_t>(std::floor(alpha / 2 * td));
    std::size_t ku = static_cast<std::size_t>(std::ceil((1 - alpha / 2) * td));
    kl = std::max<std::size_t>(kl, 1);
    ku = std::min<std::size_t>(ku, t);
    const double c = es.center;
    const double lower = c - ratio * (c - sorted[kl - 1]);
    const double upper = c + ratio * (sorted[ku - 1] - c);

    const auto indices = QuantileIndices(t, alpha);
    const ConfidenceInterval ci =
        CiFromEstimates(es, SubsamplingPlan::WithTauRatio(10000, 100, t, alpha, ratio));
    if (indices.first != kl || indices.second != ku || ci.lower != lower ||
        ci.upper != upper) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 1000 instances"};
}

Outcome NoiseVanishing() {
  const BoundedRange unit = BoundedRange::Make(0, 1);
  constexpr int kDraws = 10000;
  std::vector<double> rates;
  std::string detail;
  uint64_t stream = 0;
  for (std::size_t n : {100u, 1000u, 10000u, 100000u}) {
    Rng rng(DeriveSeed(kRootSeed, {5, stream++}));
    const double b = GlobalSensitivityMean(unit, n) / 2.0;
    int exceed = 0;
    for (int i = 0; i < kDraws; ++i) {
      exceed += std::sqrt(static_cast<double>(n)) * std::abs(SampleLaplace(b, rng)) > 0.1;
    }
    rates.push_back(static_cast<double>(exceed) / kDraws);
    detail += (detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + ": " +
              Fmt("%.4f", rates.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < rates.size(); ++i) monotone = monotone && rates[i] <= rates[i - 1];
  return {monotone && rates.back() < 0.01, detail + " (non-increasing, last < 0.01)"};
}

ExperimentConfig CoverageConfig(const DistributionSpec& spec, const std::string& id,
                                std::vector<std::size_t> sizes, bool with_bootstrap,
                                uint64_t seed) {
  ExperimentConfig config;
  config.distributions.push_back({id, spec});
  config.sample_sizes = std::move(sizes);
  MethodSpec privsub;
  privsub.id = "privsub";
  privsub.kind = MethodKind::kPrivSub;
  privsub.eps_total = 5.0;
  privsub.split = 0.5;
  privsub.m = SizeRule::Power(2.0 / 3.0);
  privsub.num_subsamples = SizeRule::Constant(50);
  config.methods.push_back(privsub);
  if (with_bootstrap) {
    MethodSpec bootstrap;
    bootstrap.id = "bootstrap";
    bootstrap.kind = MethodKind::kBootstrap;
    config.methods.push_back(bootstrap);
  }
  config.target = Target::kMedian;
  config.alpha = 0.1;
  config.replications = 300;
  config.root_seed = seed;
  config.Validate();
  return config;
}

Outcome CoverageWidthTrend() {
  const Clock::time_point start = Clock::now();
  const ExperimentConfig config =
      CoverageConfig(DistributionSpec::TruncatedNormal(0, 2, -6, 4), "normal",
                     {1000, 2500, 5000}, true, DeriveSeed(kRootSeed, {6}));
  const CoverageReport report = RunCoverage(config, kWorkers);
  if (report.has_errors()) return {false, "error rows in the coverage report"};
  bool pass = true;
  std::string detail;
  for (std::size_t n : config.sample_sizes) {
    const CoverageRow* p = report.Find("normal", n, "privsub");
    const CoverageRow* b = report.Find("normal", n, "bootstrap");
    pass = pass && p->coverage >= 0.88 && b->coverage >= 0.85 && b->coverage <= 0.95 &&
           p->mean_width >= b->mean_width;
    detail += "n=" + std::to_string(n) + " privsub " + Fmt("%.3f", p->coverage) + "/" +
              Fmt("%.4f", p->mean_width) + " boot " + Fmt("%.3f", b->coverage) + "/" +
              Fmt("%.4f", b->mean_width) + "; ";
  }
  const CoverageRow* small = report.Find("normal", 1000, "privsub");
  const CoverageRow* large = report.Find("normal", 5000, "privsub");
  pass = pass && large->coverage - small->coverage <= 0.05 &&
         large->mean_width < small->mean_width;
  const double elapsed = Seconds(start);
  pass = pass && elapsed <= 600.0;
  return {pass, detail + Fmt("%.1f", elapsed) + " s"};
}

Outcome MixtureStress() {
  const ExperimentConfig config = CoverageConfig(
      DistributionSpec::TruncatedMixture({-1.5, 1.5}, {1, 1}, {0.5, 0.5}, -5, 5), "mixture",
      {5000}, false, DeriveSeed(kRootSeed, {7}));
  const CoverageReport report = RunCoverage(config, kWorkers);
  if (report.has_errors()) return {false, "error rows in the coverage report"};
  const CoverageRow& row = report.rows.at(0);
  return {row.coverage >= 0.88, "privsub coverage " + Fmt("%.3f", row.coverage) +
                                    " +- " + Fmt("%.3f", row.coverage_stderr) +
                                    " (>= 0.88), width " + Fmt("%.4f", row.mean_width)};
}

Outcome CdfConvergence() {
  const DistributionSpec spec = DistributionSpec::TruncatedNormal(0, 2, -6, 4);
  ExperimentConfig nonprivate;
  nonprivate.distributions.push_back({"normal", spec});
  nonprivate.sample_sizes = {10000};
  MethodSpec np;
  np.id = "nonprivate";
  np.kind = MethodKind::kNonPrivateSubsampling;
  np.num_subsamples = SizeRule::Constant(300);
  nonprivate.methods.push_back(np);
  nonprivate.root_seed = DeriveSeed(kRootSeed, {8, 0});
  nonprivate.Validate();
  const CdfReport np_report = RunCdfConvergence(nonprivate, kWorkers);
  const CdfRow& np_row = np_report.rows.at(0);

  ExperimentConfig privsub;
  privsub.distributions.push_back({"normal", spec});
  privsub.sample_sizes = {1000, 25000};
  MethodSpec ps;
  ps.id = "privsub";
  ps.kind = MethodKind::kPrivSub;
  ps.eps_total = 2.0;
  privsub.methods.push_back(ps);
  int wins = 0;
  bool errors = !np_row.ok();
  for (uint64_t trial = 0; trial < 20; ++trial) {
    privsub.root_seed = DeriveSeed(kRootSeed, {8, 1, trial});
    const CdfReport report = RunCdfConvergence(privsub, kWorkers);
    errors = errors || report.has_errors();
    wins += report.Find("normal", 25000, "privsub")->sup_distance <
            report.Find("normal", 1000, "privsub")->sup_distance;
  }
  const bool pass = !errors && np_row.sup_distance < 0.1 && wins >= 15;
  return {pass, "nonprivate sup at n=1e4 " + Fmt("%.4f", np_row.sup_distance) +
                    " (< 0.1); privsub n=25000 beats n=1000 in " + std::to_string(wins) +
                    "/20 (>= 15)"};
}

Outcome Determinism() {
  ExperimentConfig config;
  config.distributions.push_back({"normal", DistributionSpec::TruncatedNormal(0, 2, -6, 4)});
  config.distributions.push_back(
      {"mixture", DistributionSpec::TruncatedMixture({-1.5, 1.5}, {1, 1}, {0.5, 0.5}, -5, 5)});
  config.sample_sizes = {500, 1000};
  for (MethodKind kind : {MethodKind::kPrivSub, MethodKind::kNonPrivateSubsampling,
                          MethodKind::kBootstrap, MethodKind::kSampleSplitting,
                          MethodKind::kExpMechStyle}) {
    MethodSpec m;
    m.kind = kind;
    m.id = std::string(MethodKindName(kind));
    config.methods.push_back(m);
  }
  config.replications = 40;
  config.root_seed = DeriveSeed(kRootSeed, {9});
  config.Validate();
  const std::string one = FormatCoverageCsv(RunCoverage(config, 1));
  const std::string eight = FormatCoverageCsv(RunCoverage(config, 8));
  const bool no_errors = one.find(",error: ") == std::string::npos;
  return {one == eight && no_errors,
          std::string(one == eight ? "identical" : "different") + " CSV bytes (" +
              std::to_string(one.size()) + " bytes) at 1 vs 8 workers"};
}

}  // namespace
}  // namespace dp_resample

int main() {
  using dp_resample::Outcome;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 accountant exactness", dp_resample::AccountantExactness},
      {"2 mechanism distributions", dp_resample::MechanismDistributions},
      {"3 inverse-sensitivity utility", dp_resample::InverseSensitivityUtility},
      {"4 subsampling CI arithmetic", dp_resample::AlgorithmArithmetic},
      {"5 noise vanishing at rate sqrt(n)", dp_resample::NoiseVanishing},
      {"6 coverage/width trend, truncated normal", dp_resample::CoverageWidthTrend},
      {"7 mixture stress coverage", dp_resample::MixtureStress},
      {"8 cdf convergence", dp_resample::CdfConvergence},
      {"9 determinism across workers", dp_resample::Determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome{false, ""};
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += outcome.pass ? 0 : 1;
    std::printf("%s [%s] %s\n", outcome.pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
