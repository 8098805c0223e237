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

#include "dp_resample/baselines.h"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dp_resample/errors.h"

namespace dp_resample {
namespace {

enum StreamTag : uint64_t {
  kResampleStream = 11,
  kPermutationStream = 12,
  kCenterStream = 13,
  kSplitStream = 14,
  kLowerBoundStream = 15,
  kUpperBoundStream = 16,
};

std::pair<double, double> OrderStatisticInterval(std::vector<double> values,
                                                 double alpha) {
  std::sort(values.begin(), values.end());
  const auto [k_lower, k_upper] = QuantileIndices(values.size(), alpha);
  return {values[k_lower - 1], values[k_upper - 1]};
}

}  // namespace

std::size_t BootstrapReplicates(std::size_t n) {
  const auto five_root = static_cast<std::size_t>(
      std::ceil(5.0 * std::sqrt(static_cast<double>(n)) - 1e-9));
  return std::max<std::size_t>(std::min<std::size_t>(five_root, 500), 200);
}

BootstrapPlan BootstrapPlan::ForSampleSize(std::size_t n, double alpha,
                                           bool centered) {
  BootstrapPlan plan{BootstrapReplicates(n), alpha, centered};
  plan.Validate();
  return plan;
}

void BootstrapPlan::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PlanError("alpha must lie in (0, 1)");
  if (num_replicates < MinSubsamples(alpha)) {
    throw PlanError("bootstrap needs at least ceil(2/alpha) replicates");
  }
}

std::vector<double> BootstrapReplicateValues(std::span<const double> data,
                                             Statistic statistic,
                                             std::size_t num_replicates,
                                             Rng& rng) {
  if (data.empty()) throw DomainError("bootstrap of an empty dataset");
  const std::size_t n = data.size();
  std::vector<double> resample(n);
  std::vector<double> values;
  values.reserve(num_replicates);
  for (std::size_t r = 0; r < num_replicates; ++r) {
    for (std::size_t i = 0; i < n; ++i) resample[i] = data[rng.UniformInt(n)];
    values.push_back(Evaluate(statistic, resample));
  }
  return values;
}

ConfidenceInterval BootstrapCi(std::span<const double> data,
                               Statistic statistic, const BootstrapPlan& plan,
                               uint64_t seed) {
  if (data.empty()) throw DomainError("bootstrap of an empty dataset");
  if (data.size() < 2) throw DomainError("bootstrap needs at least 2 points");
  plan.Validate();
  Rng rng = Rng::Derive(seed, {kResampleStream});
  const auto [q_lo, q_hi] = OrderStatisticInterval(
      BootstrapReplicateValues(data, statistic, plan.num_replicates, rng),
      plan.alpha);
  if (plan.centered) {
    const double theta = Evaluate(statistic, data);
    return ConfidenceInterval{2.0 * theta - q_hi, 2.0 * theta - q_lo, plan.alpha};
  }
  return ConfidenceInterval{q_lo, q_hi, plan.alpha};
}

ConfidenceInterval BootstrapCi(std::span<const double> data,
                               Statistic statistic, double alpha,
                               uint64_t seed) {
  return BootstrapCi(data, statistic,
                     BootstrapPlan::ForSampleSize(data.size(), alpha), seed);
}

SplitPlan SplitPlan::ForData(std::size_t n, std::size_t num_splits,
                             double alpha) {
  if (num_splits < 1 || num_splits > n) {
    throw PlanError("number of splits must lie in [1, n]");
  }
  SplitPlan plan;
  plan.num_splits = num_splits;
  plan.split_size = n / num_splits;
  plan.alpha = alpha;
  plan.tau_ratio = std::sqrt(static_cast<double>(plan.split_size) /
                             static_cast<double>(n));
  plan.Validate(n);
  return plan;
}

void SplitPlan::Validate(std::size_t n) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PlanError("alpha must lie in (0, 1)");
  if (split_size < 1 || num_splits < 1) {
    throw PlanError("split size and count must be positive");
  }
  if (num_splits < MinSubsamples(alpha)) {
    throw PlanError("sample splitting needs at least ceil(2/alpha) splits");
  }
  if (!(tau_ratio > 0.0)) throw PlanError("tau ratio must be positive");
  if (n < split_size * num_splits) {
    throw PlanError("insufficient data: n=" + std::to_string(n) + " < " +
                    std::to_string(split_size) + " x " +
                    std::to_string(num_splits));
  }
  if (n - split_size * num_splits >= num_splits) {
    throw PlanError("split size too small: leftovers exceed one per split");
  }
}

std::vector<std::vector<std::size_t>> PartitionIndices(std::size_t n,
                                                       std::size_t num_splits,
                                                       Rng& rng) {
  if (num_splits < 1 || num_splits > n) {
    throw PlanError("number of splits must lie in [1, n]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformInt(i)]);
  }
  const std::size_t base = n / num_splits;
  const std::size_t extra = n % num_splits;
  std::vector<std::vector<std::size_t>> parts(num_splits);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < num_splits; ++s) {
    const std::size_t size = base + (s < extra ? 1 : 0);
    parts[s].assign(order.begin() + static_cast<std::ptrdiff_t>(offset),
                    order.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return parts;
}

ConfidenceInterval SampleSplittingCi(std::span<const double> data,
                                     const SplitPlan& plan,
                                     const Mechanism& mechanism,
                                     const PrivacyBudget& budget,
                                     uint64_t seed, double center_fraction) {
  plan.Validate(data.size());
  if (!(center_fraction > 0.0 && center_fraction < 1.0)) {
    throw ParameterError("center budget fraction must lie in (0, 1)");
  }
  const PrivacyBudget center_budget{budget.epsilon * center_fraction,
                                    budget.delta * center_fraction};
  const PrivacyBudget split_budget{budget.epsilon * (1.0 - center_fraction),
                                   budget.delta * (1.0 - center_fraction)};

  Rng permutation_rng = Rng::Derive(seed, {kPermutationStream});
  const auto parts = PartitionIndices(data.size(), plan.num_splits, permutation_rng);

  EstimateSet estimates;
  Rng center_rng = Rng::Derive(seed, {kCenterStream});
  estimates.center = mechanism.Release(data, center_budget, center_rng);
  std::vector<double> values;
  for (std::size_t s = 0; s < parts.size(); ++s) {
    values.clear();
    for (std::size_t idx : parts[s]) values.push_back(data[idx]);
    Rng split_rng = Rng::Derive(seed, {kSplitStream, s});
    estimates.estimates.push_back(mechanism.Release(values, split_budget, split_rng));
  }
  std::stable_sort(estimates.estimates.begin(), estimates.estimates.end());

  SubsamplingPlan as_plan;
  as_plan.n = data.size();
  as_plan.m = plan.split_size;
  as_plan.num_subsamples = plan.num_splits;
  as_plan.alpha = plan.alpha;
  as_plan.tau_ratio = plan.tau_ratio;
  as_plan.tau_n = std::sqrt(static_cast<double>(data.size()));
  return CiFromEstimates(estimates, as_plan);
}

RankBounds MedianRankBounds(std::size_t n, double alpha) {
  if (n < 1) throw DomainError("rank bounds need n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const boost::math::binomial_distribution<double> binom(static_cast<double>(n), 0.5);
  const double target = alpha / 2.0;
  if (boost::math::cdf(binom, 0.0) > target) {
    throw DomainError("n=" + std::to_string(n) +
                      " is too small for a median interval at this alpha");
  }
  // Largest k with cdf(k - 1) <= target; cdf is increasing in k.
  std::size_t lo = 1;
  std::size_t hi = (n + 1) / 2;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (boost::math::cdf(binom, static_cast<double>(mid - 1)) <= target) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return RankBounds{lo, n + 1 - lo};
}

double ExpMechOrderStatistic(std::span<const double> sorted,
                             const BoundedRange& range, std::size_t rank,
                             BoundSide side, double epsilon,
                             double granularity, Rng& rng) {
  const std::size_t n = sorted.size();
  if (n == 0) throw DomainError("order statistic of an empty dataset");
  if (rank < 1 || rank > n) throw DomainError("rank out of range");
  if (!(epsilon > 0.0)) throw ParameterError("exponential mechanism needs epsilon > 0");
  if (!(granularity > 0.0)) throw ParameterError("granularity must be positive");
  if (std::isinf(epsilon)) return sorted[rank - 1];

  // Gap g in [0, n] spans [x_(g), x_(g+1)] with x_(0) = lo, x_(n+1) = hi, and
  // has exactly g points below it. The lower bound targets the gap just
  // below x_(rank), the upper bound the gap just above it.
  const std::size_t target = side == BoundSide::kLower ? rank - 1 : rank;
  auto snap_down = [&](double x) {
    return range.lo + std::floor((x - range.lo) / granularity) * granularity;
  };
  auto snap_up = [&](double x) {
    return range.lo + std::ceil((x - range.lo) / granularity) * granularity;
  };

  std::vector<double> gap_lo(n + 1);
  std::vector<double> gap_hi(n + 1);
  std::vector<double> log_weights(n + 1);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g <= n; ++g) {
    const double left = g == 0 ? range.lo : sorted[g - 1];
    const double right = g == n ? range.hi : sorted[g];
    double a = std::max(range.lo, snap_down(left));
    double b = std::min(range.hi, snap_up(right));
    if (b - a < granularity) {
      // Ties (or points on the grid): give the gap one full grid cell.
      b = std::min(range.hi, a + granularity);
      a = std::max(range.lo, b - granularity);
    }
    gap_lo[g] = a;
    gap_hi[g] = b;
    const double error = std::abs(static_cast<double>(g) - static_cast<double>(target));
    log_weights[g] = std::log(b - a) - 0.5 * epsilon * error;
    max_log = std::max(max_log, log_weights[g]);
  }
  std::vector<double> cumulative(n + 1);
  double total = 0.0;
  for (std::size_t g = 0; g <= n; ++g) {
    total += std::exp(log_weights[g] - max_log);
    cumulative[g] = total;
  }
  const double u = rng.Uniform() * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  const auto g = static_cast<std::size_t>(it - cumulative.begin());
  return std::clamp(gap_lo[g] + rng.Uniform() * (gap_hi[g] - gap_lo[g]),
                    gap_lo[g], gap_hi[g]);
}

ConfidenceInterval ExpMechMedianCi(std::span<const double> data,
                                   const BoundedRange& range,
                                   const PrivacyBudget& budget, double alpha,
                                   double granularity, uint64_t seed) {
  if (data.empty()) throw DomainError("median interval of an empty dataset");
  if (!(budget.epsilon > 0.0)) {
    throw ParameterError("exponential mechanism needs epsilon > 0");
  }
  if (!(granularity > 0.0)) throw ParameterError("granularity must be positive");
  const RankBounds ranks = MedianRankBounds(data.size(), alpha);
  std::vector<double> sorted(data.begin(), data.end());
  for (double& v : sorted) v = range.Clip(v);
  std::sort(sorted.begin(), sorted.end());

  const double per_bound = budget.epsilon / 2.0;
  Rng lower_rng = Rng::Derive(seed, {kLowerBoundStream});
  Rng upper_rng = Rng::Derive(seed, {kUpperBoundStream});
  double lower = ExpMechOrderStatistic(sorted, range, ranks.lower,
                                       BoundSide::kLower, per_bound,
                                       granularity, lower_rng);
  double upper = ExpMechOrderStatistic(sorted, range, ranks.upper,
                                       BoundSide::kUpper, per_bound,
                                       granularity, upper_rng);
  if (lower > upper) std::swap(lower, upper);
  return ConfidenceInterval{lower, upper, alpha};
}

}  // namespace dp_resample
