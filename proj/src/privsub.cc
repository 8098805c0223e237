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

#include "dp_resample/privsub.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dp_resample/errors.h"

namespace dp_resample {
namespace {

enum StreamTag : uint64_t {
  kCenterStream = 1,
  kSubsampleStream = 2,
  kMechanismStream = 3,
};

SubsamplingResult RunWithMechanism(std::span<const double> data,
                                   const SubsamplingPlan& plan,
                                   const Mechanism& mechanism,
                                   const PrivacyBudget& center_budget,
                                   const PrivacyBudget& subsample_budget,
                                   uint64_t seed) {
  plan.Validate();
  if (data.size() != plan.n) {
    throw PlanError("dataset has " + std::to_string(data.size()) +
                    " points but the plan expects n=" + std::to_string(plan.n));
  }
  SubsamplingResult result;
  Rng center_rng = Rng::Derive(seed, {kCenterStream});
  result.estimates.center = mechanism.Release(data, center_budget, center_rng);

  std::vector<double> subsample(plan.m);
  result.estimates.estimates.reserve(plan.num_subsamples);
  for (std::size_t i = 0; i < plan.num_subsamples; ++i) {
    Rng draw_rng = Rng::Derive(seed, {kSubsampleStream, i});
    const std::vector<std::size_t> indices = DrawSubsample(plan.n, plan.m, draw_rng);
    for (std::size_t j = 0; j < plan.m; ++j) subsample[j] = data[indices[j]];
    Rng mech_rng = Rng::Derive(seed, {kMechanismStream, i});
    result.estimates.estimates.push_back(
        mechanism.Release(subsample, subsample_budget, mech_rng));
  }
  std::stable_sort(result.estimates.estimates.begin(),
                   result.estimates.estimates.end());
  result.ci = CiFromEstimates(result.estimates, plan);
  result.cdf = EmpiricalCdf::FromEstimates(result.estimates, plan.tau_m());
  return result;
}

}  // namespace

std::size_t MinSubsamples(double alpha) {
  // The small offset absorbs rounding in 2 / alpha for alphas like 0.1.
  return static_cast<std::size_t>(std::ceil(2.0 / alpha - 1e-9));
}

SubsamplingPlan SubsamplingPlan::WithSqrtRate(std::size_t n, std::size_t m,
                                              std::size_t num_subsamples,
                                              double alpha) {
  SubsamplingPlan plan;
  plan.n = n;
  plan.m = m;
  plan.num_subsamples = num_subsamples;
  plan.alpha = alpha;
  plan.tau_ratio =
      n > 0 ? std::sqrt(static_cast<double>(m) / static_cast<double>(n)) : 0.0;
  plan.tau_n = std::sqrt(static_cast<double>(n));
  plan.Validate();
  return plan;
}

SubsamplingPlan SubsamplingPlan::WithTauRatio(std::size_t n, std::size_t m,
                                              std::size_t num_subsamples,
                                              double alpha, double tau_ratio) {
  SubsamplingPlan plan;
  plan.n = n;
  plan.m = m;
  plan.num_subsamples = num_subsamples;
  plan.alpha = alpha;
  plan.tau_ratio = tau_ratio;
  plan.tau_n = std::sqrt(static_cast<double>(n));
  plan.Validate();
  return plan;
}

void SubsamplingPlan::Validate() const {
  if (m < 1 || m > n) {
    throw PlanError("subsampling plan needs 1 <= m <= n (m=" +
                    std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PlanError("alpha must lie in (0, 1)");
  }
  if (num_subsamples < MinSubsamples(alpha)) {
    throw PlanError("T=" + std::to_string(num_subsamples) +
                    " is below ceil(2/alpha)=" +
                    std::to_string(MinSubsamples(alpha)));
  }
  if (!(tau_ratio > 0.0 && tau_ratio <= 1.0)) {
    throw PlanError("tau ratio must lie in (0, 1]");
  }
  if (!(tau_n > 0.0) || !std::isfinite(tau_n)) {
    throw PlanError("tau_n must be positive");
  }
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> points)
    : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
}

EmpiricalCdf EmpiricalCdf::FromEstimates(const EstimateSet& estimates,
                                         double tau) {
  std::vector<double> points;
  points.reserve(estimates.estimates.size());
  for (double e : estimates.estimates) points.push_back(tau * (e - estimates.center));
  return EmpiricalCdf(std::move(points));
}

double EmpiricalCdf::Evaluate(double x) const {
  if (points_.empty()) return 0.0;
  const auto it = std::upper_bound(points_.begin(), points_.end(), x);
  return static_cast<double>(it - points_.begin()) /
         static_cast<double>(points_.size());
}

double EmpiricalCdf::Quantile(double q) const {
  if (points_.empty()) throw DomainError("quantile of an empty CDF");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("quantile level must be in (0, 1]");
  const double total = static_cast<double>(points_.size());
  auto k = static_cast<std::size_t>(std::ceil(q * total - 1e-9));
  k = std::clamp<std::size_t>(k, 1, points_.size());
  return points_[k - 1];
}

std::vector<std::size_t> DrawSubsample(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 1 || m > n) {
    throw ParameterError("subsample size must satisfy 1 <= m <= n");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  return pool;
}

std::vector<std::size_t> DrawSubsample(std::size_t n, std::size_t m,
                                       uint64_t seed) {
  Rng rng(seed);
  return DrawSubsample(n, m, rng);
}

std::pair<std::size_t, std::size_t> QuantileIndices(std::size_t num_subsamples,
                                                    double alpha) {
  if (num_subsamples < 1 || !(alpha > 0.0 && alpha < 1.0) ||
      num_subsamples < MinSubsamples(alpha)) {
    throw PlanError("quantile indices need alpha in (0, 1) and T >= ceil(2/alpha)");
  }
  const double t = static_cast<double>(num_subsamples);
  const double lower = std::floor((alpha / 2.0) * t);
  const double upper = std::ceil((1.0 - alpha / 2.0) * t);
  const auto k_lower = static_cast<std::size_t>(std::max(lower, 1.0));
  const auto k_upper = static_cast<std::size_t>(std::min(upper, t));
  return {k_lower, k_upper};
}

ConfidenceInterval CiFromEstimates(const EstimateSet& estimates,
                                   const SubsamplingPlan& plan) {
  if (estimates.estimates.size() != plan.num_subsamples) {
    throw PlanError("estimate count does not match the plan's T");
  }
  const auto [k_lower, k_upper] = QuantileIndices(plan.num_subsamples, plan.alpha);
  const double c = estimates.center;
  const double r = plan.tau_ratio;
  const double low_stat = estimates.estimates[k_lower - 1];
  const double high_stat = estimates.estimates[k_upper - 1];
  return ConfidenceInterval{c - r * (c - low_stat), c + r * (high_stat - c),
                            plan.alpha};
}

SubsamplingResult RunPrivSub(std::span<const double> data,
                             const SubsamplingPlan& plan,
                             const Mechanism& mechanism,
                             const PrivSubBudget& budgets, uint64_t seed) {
  budgets.Validate();
  if (budgets.m != plan.m || budgets.n != plan.n ||
      budgets.num_subsamples != plan.num_subsamples) {
    throw PlanError("privacy budgets were calibrated for a different (m, n, T)");
  }
  return RunWithMechanism(data, plan, mechanism, budgets.center,
                          budgets.per_subsample, seed);
}

SubsamplingResult RunNonPrivateSubsampling(std::span<const double> data,
                                           const SubsamplingPlan& plan,
                                           Statistic statistic, uint64_t seed) {
  const PrivacyBudget unused{};
  return RunWithMechanism(data, plan, Mechanism::Exact(statistic), unused,
                          unused, seed);
}

}  // namespace dp_resample
