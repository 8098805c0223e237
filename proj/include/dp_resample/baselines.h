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

#ifndef DP_RESAMPLE_BASELINES_H_
#define DP_RESAMPLE_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dp_resample/mechanisms.h"
#include "dp_resample/privsub.h"
#include "dp_resample/rng.h"

namespace dp_resample {

// max{min{ceil(5 sqrt(n)), 500}, 200}.
std::size_t BootstrapReplicates(std::size_t n);

struct BootstrapPlan {
  std::size_t num_replicates = 200;
  double alpha = 0.1;
  // false: percentile interval [q_lo, q_hi]. true: basic (pivot) interval
  // [2 theta - q_hi, 2 theta - q_lo].
  bool centered = false;

  static BootstrapPlan ForSampleSize(std::size_t n, double alpha,
                                     bool centered = false);
  void Validate() const;
};

// Statistic values of the bootstrap replicates, unsorted.
std::vector<double> BootstrapReplicateValues(std::span<const double> data,
                                             Statistic statistic,
                                             std::size_t num_replicates,
                                             Rng& rng);

// Percentile bootstrap. The quantiles are the order statistics at
// QuantileIndices(T, alpha) of the replicate values.
ConfidenceInterval BootstrapCi(std::span<const double> data,
                               Statistic statistic, const BootstrapPlan& plan,
                               uint64_t seed);
ConfidenceInterval BootstrapCi(std::span<const double> data,
                               Statistic statistic, double alpha,
                               uint64_t seed);

struct SplitPlan {
  std::size_t split_size = 1;
  std::size_t num_splits = 1;
  double tau_ratio = 1.0;
  double alpha = 0.1;

  // split_size = floor(n / num_splits), tau_ratio = sqrt(split_size / n).
  static SplitPlan ForData(std::size_t n, std::size_t num_splits, double alpha);

  // Requires num_splits >= ceil(2 / alpha), tau_ratio > 0 and
  // split_size * num_splits <= n < (split_size + 1) * num_splits, so the
  // leftovers can be spread one per split.
  void Validate(std::size_t n) const;
};

// Random partition of [0, n) into num_splits parts whose sizes differ by at
// most one.
std::vector<std::vector<std::size_t>> PartitionIndices(std::size_t n,
                                                       std::size_t num_splits,
                                                       Rng& rng);

// Sample splitting: center on the full data at center_fraction * budget.
// Every split estimate gets the rest of the budget in full, since the splits
// are disjoint. The interval is assembled like CiFromEstimates.
ConfidenceInterval SampleSplittingCi(std::span<const double> data,
                                     const SplitPlan& plan,
                                     const Mechanism& mechanism,
                                     const PrivacyBudget& budget,
                                     uint64_t seed,
                                     double center_fraction = 0.5);

// 1-based ranks of the distribution-free median interval: lower = largest k
// with BinomCdf(k - 1; n, 1/2) <= alpha / 2, upper = n + 1 - lower.
struct RankBounds {
  std::size_t lower;
  std::size_t upper;
};
RankBounds MedianRankBounds(std::size_t n, double alpha);

enum class BoundSide { kLower, kUpper };

// Exponential mechanism for the value of the order statistic with 1-based
// `rank` in `sorted` (clipped, nondecreasing). Candidates are the gaps
// between consecutive order statistics (plus the range ends), with utility
// -|gap index - target| and sensitivity 1. Each gap is widened outwards onto
// the granularity grid anchored at range.lo (and to at least one grid cell),
// then a gap is drawn by weight width * exp(-epsilon * |error| / 2) and a
// point uniformly inside. The target gap sits just outside the order
// statistic on the requested side. epsilon = +inf returns the order statistic.
double ExpMechOrderStatistic(std::span<const double> sorted,
                             const BoundedRange& range, std::size_t rank,
                             BoundSide side, double epsilon,
                             double granularity, Rng& rng);

// Private distribution-free median interval: both MedianRankBounds order
// statistics released by ExpMechOrderStatistic at epsilon / 2 each.
ConfidenceInterval ExpMechMedianCi(std::span<const double> data,
                                   const BoundedRange& range,
                                   const PrivacyBudget& budget, double alpha,
                                   double granularity, uint64_t seed);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_BASELINES_H_
