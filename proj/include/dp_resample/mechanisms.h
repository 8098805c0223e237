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

#ifndef DP_RESAMPLE_MECHANISMS_H_
#define DP_RESAMPLE_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dp_resample/rng.h"

namespace dp_resample {

// An (epsilon, delta) pair. epsilon may be +infinity, which every mechanism
// treats as the noise-free limit.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  // Validating constructor: epsilon >= 0, delta in [0, 1].
  static PrivacyBudget Make(double epsilon, double delta = 0.0);

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;
};

// Value domain [lo, hi] used for clipping and sensitivity.
struct BoundedRange {
  double lo = 0.0;
  double hi = 1.0;

  static BoundedRange Make(double lo, double hi);

  double width() const { return hi - lo; }
  double Clip(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

double Mean(std::span<const double> data);

// Lower-middle order statistic x_(ceil(n/2)) (1-based).
double Median(std::span<const double> data);

// (hi - lo) / n.
double GlobalSensitivityMean(const BoundedRange& range, std::size_t n);

// Laplace draw with scale b by inverse CDF of one open uniform.
double SampleLaplace(double scale, Rng& rng);

// sigma for the Gaussian mechanism: sqrt(2 ln(1.25/delta)) * sensitivity /
// epsilon. Requires epsilon, delta in (0, 1).
double GaussianSigma(double sensitivity, const PrivacyBudget& budget);

// Mean of the data clipped into range, plus Lap(GlobalSensitivityMean/eps).
// The output itself is not clipped.
double LaplaceMean(std::span<const double> data, const BoundedRange& range,
                   const PrivacyBudget& budget, Rng& rng);
double LaplaceMean(std::span<const double> data, const BoundedRange& range,
                   const PrivacyBudget& budget, uint64_t seed);

// Mean of the clipped data plus N(0, GaussianSigma^2).
double GaussianMean(std::span<const double> data, const BoundedRange& range,
                    const PrivacyBudget& budget, Rng& rng);
double GaussianMean(std::span<const double> data, const BoundedRange& range,
                    const PrivacyBudget& budget, uint64_t seed);

// Number of data points in (t, m] when t < m and in [m, t) when t > m, with
// m = Median(data). Zero at t = m.
std::size_t PathLengthMedian(std::span<const double> data, double t);

// A maximal interval on which the path length is constant.
struct MedianPiece {
  double lo;
  double hi;
  std::size_t path_length;

  double length() const { return hi - lo; }
};

// Constant pieces of the path length over range, for the clipped data. Pieces
// of zero length (ties, or data clipped onto an endpoint) are dropped.
std::vector<MedianPiece> InverseSensitivityPieces(std::span<const double> data,
                                                  const BoundedRange& range);

// Draws from the density on [lo, hi] proportional to
// exp(-epsilon * len(t) / 2): picks a constant piece with probability
// proportional to length * exp(-epsilon * len / 2), then a uniform point in
// it. epsilon = 0 yields the uniform law on the range; epsilon = +inf returns
// the median of the clipped data.
double InverseSensitivityMedian(std::span<const double> data,
                                const BoundedRange& range,
                                const PrivacyBudget& budget, Rng& rng);
double InverseSensitivityMedian(std::span<const double> data,
                                const BoundedRange& range,
                                const PrivacyBudget& budget, uint64_t seed);

enum class Statistic { kMean, kMedian };

double Evaluate(Statistic statistic, std::span<const double> data);
Statistic ParseStatistic(std::string_view name);
std::string_view StatisticName(Statistic statistic);

enum class MechanismKind {
  kExactMean,
  kExactMedian,
  kLaplaceMean,
  kGaussianMean,
  kInverseSensitivityMedian,
};

// Mechanism handle passed to the subsampling procedures. The exact kinds
// ignore the budget and release the non-private statistic.
class Mechanism {
 public:
  Mechanism(MechanismKind kind, BoundedRange range, bool clip_output = false)
      : kind_(kind), range_(range), clip_output_(clip_output) {}

  static Mechanism Exact(Statistic statistic);

  // Accepts "laplace_mean", "gaussian_mean", "inverse_sensitivity_median",
  // "exact_mean" and "exact_median".
  static Mechanism FromName(std::string_view name, BoundedRange range,
                            bool clip_output = false);

  double Release(std::span<const double> data, const PrivacyBudget& budget,
                 Rng& rng) const;

  MechanismKind kind() const { return kind_; }
  const BoundedRange& range() const { return range_; }
  bool clip_output() const { return clip_output_; }
  bool is_private() const;
  std::string_view name() const;

 private:
  MechanismKind kind_;
  BoundedRange range_;
  bool clip_output_;
};

}  // namespace dp_resample

#endif  // DP_RESAMPLE_MECHANISMS_H_
