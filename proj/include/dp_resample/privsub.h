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

#ifndef DP_RESAMPLE_PRIVSUB_H_
#define DP_RESAMPLE_PRIVSUB_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dp_resample/accountant.h"
#include "dp_resample/mechanisms.h"
#include "dp_resample/rng.h"

namespace dp_resample {

// Parameters of one subsampling run. tau_ratio is tau_m / tau_n; tau_n is
// kept separately so the empirical CDF can be expressed on the tau_m scale
// (the scale of the limit law).
struct SubsamplingPlan {
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t num_subsamples = 1;
  double alpha = 0.1;
  double tau_ratio = 1.0;
  double tau_n = 1.0;

  // Rate tau_k = sqrt(k): tau_ratio = sqrt(m / n), tau_n = sqrt(n).
  static SubsamplingPlan WithSqrtRate(std::size_t n, std::size_t m,
                                      std::size_t num_subsamples, double alpha);
  // Explicit ratio; tau_n defaults to sqrt(n).
  static SubsamplingPlan WithTauRatio(std::size_t n, std::size_t m,
                                      std::size_t num_subsamples, double alpha,
                                      double tau_ratio);

  double tau_m() const { return tau_ratio * tau_n; }

  // Throws PlanError on violated invariants, in particular
  // num_subsamples < ceil(2 / alpha).
  void Validate() const;
};

// Smallest T accepted for a given alpha: ceil(2 / alpha).
std::size_t MinSubsamples(double alpha);

struct EstimateSet {
  double center = 0.0;
  // Sorted nondecreasing.
  std::vector<double> estimates;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.1;

  double width() const { return upper - lower; }
  bool Contains(double x) const { return lower <= x && x <= upper; }
};

// Right-continuous step function over the points tau_m * (estimate - center).
class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  // `points` need not be sorted.
  explicit EmpiricalCdf(std::vector<double> points);

  static EmpiricalCdf FromEstimates(const EstimateSet& estimates, double tau);

  // Fraction of points <= x.
  double Evaluate(double x) const;

  // Generalized inverse: smallest point p with Evaluate(p) >= q, q in (0, 1].
  double Quantile(double q) const;

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<double> points_;
};

struct SubsamplingResult {
  ConfidenceInterval ci;
  EmpiricalCdf cdf;
  EstimateSet estimates;
};

// m distinct indices in [0, n), uniform over all size-m subsets (partial
// Fisher-Yates), returned in draw order.
std::vector<std::size_t> DrawSubsample(std::size_t n, std::size_t m, Rng& rng);
std::vector<std::size_t> DrawSubsample(std::size_t n, std::size_t m,
                                       uint64_t seed);

// 1-based order-statistic indices floor((alpha/2) T) and
// ceil((1 - alpha/2) T), clamped into [1, T].
std::pair<std::size_t, std::size_t> QuantileIndices(std::size_t num_subsamples,
                                                    double alpha);

// [c - r (c - e_(kl)), c + r (e_(ku) - c)] with r = plan.tau_ratio.
ConfidenceInterval CiFromEstimates(const EstimateSet& estimates,
                                   const SubsamplingPlan& plan);

// Private subsampling CI. The center is released at budgets.center on the full
// data and each of the T subsample estimates at budgets.per_subsample;
// amplification is accounted for in PrivSubTotal, not here.
//
// Random streams are derived from `seed`: subsample i uses the same stream as
// in RunNonPrivateSubsampling, so a non-private mechanism reproduces it
// exactly.
SubsamplingResult RunPrivSub(std::span<const double> data,
                             const SubsamplingPlan& plan,
                             const Mechanism& mechanism,
                             const PrivSubBudget& budgets, uint64_t seed);

SubsamplingResult RunNonPrivateSubsampling(std::span<const double> data,
                                           const SubsamplingPlan& plan,
                                           Statistic statistic, uint64_t seed);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_PRIVSUB_H_
