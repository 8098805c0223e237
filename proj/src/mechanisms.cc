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

#include "dp_resample/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dp_resample/errors.h"

namespace dp_resample {
namespace {

void RequireNonEmpty(std::span<const double> data) {
  if (data.empty()) throw DomainError("dataset is empty");
}

std::vector<double> ClippedSorted(std::span<const double> data,
                                  const BoundedRange& range) {
  std::vector<double> values(data.begin(), data.end());
  for (double& v : values) v = range.Clip(v);
  std::sort(values.begin(), values.end());
  return values;
}

double ClippedMean(std::span<const double> data, const BoundedRange& range) {
  RequireNonEmpty(data);
  double total = 0.0;
  for (double v : data) total += range.Clip(v);
  return total / static_cast<double>(data.size());
}

// Path length at t for sorted data with median value `median`.
std::size_t SortedPathLength(const std::vector<double>& sorted, double median,
                             double t) {
  if (t < median) {
    // |{x : t < x <= m}|
    const auto first = std::upper_bound(sorted.begin(), sorted.end(), t);
    const auto last = std::upper_bound(sorted.begin(), sorted.end(), median);
    return static_cast<std::size_t>(last - first);
  }
  if (t > median) {
    // |{x : m <= x < t}|
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), median);
    const auto last = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<std::size_t>(last - first);
  }
  return 0;
}

std::vector<MedianPiece> PiecesFromSorted(const std::vector<double>& sorted,
                                          const BoundedRange& range) {
  const double median = sorted[(sorted.size() + 1) / 2 - 1];
  std::vector<MedianPiece> pieces;
  pieces.reserve(sorted.size() + 1);
  double left = range.lo;
  auto emit = [&](double right) {
    if (right > left) {
      const double mid = left + 0.5 * (right - left);
      pieces.push_back({left, right, SortedPathLength(sorted, median, mid)});
    }
    left = std::max(left, right);
  };
  for (double x : sorted) emit(x);
  emit(range.hi);
  return pieces;
}

}  // namespace

PrivacyBudget PrivacyBudget::Make(double epsilon, double delta) {
  if (!(epsilon >= 0.0)) {
    throw ParameterError("epsilon must be >= 0");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw ParameterError("delta must lie in [0, 1]");
  }
  return PrivacyBudget{epsilon, delta};
}

BoundedRange BoundedRange::Make(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ParameterError("range requires finite lo < hi");
  }
  return BoundedRange{lo, hi};
}

double Mean(std::span<const double> data) {
  RequireNonEmpty(data);
  return std::accumulate(data.begin(), data.end(), 0.0) /
         static_cast<double>(data.size());
}

double Median(std::span<const double> data) {
  RequireNonEmpty(data);
  std::vector<double> values(data.begin(), data.end());
  const std::size_t k = (values.size() + 1) / 2 - 1;
  std::nth_element(values.begin(), values.begin() + k, values.end());
  return values[k];
}

double GlobalSensitivityMean(const BoundedRange& range, std::size_t n) {
  if (n == 0) throw DomainError("sensitivity undefined for n = 0");
  return range.width() / static_cast<double>(n);
}

double SampleLaplace(double scale, Rng& rng) {
  const double u = rng.UniformOpen() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double GaussianSigma(double sensitivity, const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0 && budget.epsilon < 1.0)) {
    throw ParameterError("gaussian mechanism requires epsilon in (0, 1)");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw ParameterError("gaussian mechanism requires delta in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / budget.delta)) * sensitivity /
         budget.epsilon;
}

double LaplaceMean(std::span<const double> data, const BoundedRange& range,
                   const PrivacyBudget& budget, Rng& rng) {
  if (!(budget.epsilon > 0.0)) {
    throw ParameterError("laplace mechanism with epsilon = 0 has infinite noise");
  }
  const double center = ClippedMean(data, range);
  const double scale = GlobalSensitivityMean(range, data.size()) / budget.epsilon;
  return center + SampleLaplace(scale, rng);
}

double LaplaceMean(std::span<const double> data, const BoundedRange& range,
                   const PrivacyBudget& budget, uint64_t seed) {
  Rng rng(seed);
  return LaplaceMean(data, range, budget, rng);
}

double GaussianMean(std::span<const double> data, const BoundedRange& range,
                    const PrivacyBudget& budget, Rng& rng) {
  const double sigma =
      GaussianSigma(GlobalSensitivityMean(range, data.size()), budget);
  return ClippedMean(data, range) + sigma * rng.StandardNormal();
}

double GaussianMean(std::span<const double> data, const BoundedRange& range,
                    const PrivacyBudget& budget, uint64_t seed) {
  Rng rng(seed);
  return GaussianMean(data, range, budget, rng);
}

std::size_t PathLengthMedian(std::span<const double> data, double t) {
  RequireNonEmpty(data);
  const double median = Median(data);
  std::size_t count = 0;
  for (double x : data) {
    if ((t < median && x > t && x <= median) ||
        (t > median && x >= median && x < t)) {
      ++count;
    }
  }
  return count;
}

std::vector<MedianPiece> InverseSensitivityPieces(std::span<const double> data,
                                                  const BoundedRange& range) {
  RequireNonEmpty(data);
  return PiecesFromSorted(ClippedSorted(data, range), range);
}

double InverseSensitivityMedian(std::span<const double> data,
                                const BoundedRange& range,
                                const PrivacyBudget& budget, Rng& rng) {
  RequireNonEmpty(data);
  const double epsilon = budget.epsilon;
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
  const std::vector<double> sorted = ClippedSorted(data, range);
  if (std::isinf(epsilon)) {
    return sorted[(sorted.size() + 1) / 2 - 1];
  }
  const std::vector<MedianPiece> pieces = PiecesFromSorted(sorted, range);

  // Log-weights keep exp(-eps * len / 2) representable for large n.
  std::vector<double> log_weights(pieces.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    log_weights[i] = std::log(pieces[i].length()) -
                     0.5 * epsilon * static_cast<double>(pieces[i].path_length);
    max_log = std::max(max_log, log_weights[i]);
  }
  std::vector<double> cumulative(pieces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    total += std::exp(log_weights[i] - max_log);
    cumulative[i] = total;
  }
  const double u = rng.Uniform() * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  const MedianPiece& piece = pieces[static_cast<std::size_t>(it - cumulative.begin())];
  const double value = piece.lo + rng.Uniform() * piece.length();
  return std::clamp(value, piece.lo, piece.hi);
}

double InverseSensitivityMedian(std::span<const double> data,
                                const BoundedRange& range,
                                const PrivacyBudget& budget, uint64_t seed) {
  Rng rng(seed);
  return InverseSensitivityMedian(data, range, budget, rng);
}

double Evaluate(Statistic statistic, std::span<const double> data) {
  return statistic == Statistic::kMean ? Mean(data) : Median(data);
}

Statistic ParseStatistic(std::string_view name) {
  if (name == "mean") return Statistic::kMean;
  if (name == "median") return Statistic::kMedian;
  throw ParameterError("unknown statistic '" + std::string(name) + "'");
}

std::string_view StatisticName(Statistic statistic) {
  return statistic == Statistic::kMean ? "mean" : "median";
}

Mechanism Mechanism::Exact(Statistic statistic) {
  return Mechanism(statistic == Statistic::kMean ? MechanismKind::kExactMean
                                                 : MechanismKind::kExactMedian,
                   BoundedRange{});
}

Mechanism Mechanism::FromName(std::string_view name, BoundedRange range,
                              bool clip_output) {
  if (name == "laplace_mean") {
    return Mechanism(MechanismKind::kLaplaceMean, range, clip_output);
  }
  if (name == "gaussian_mean") {
    return Mechanism(MechanismKind::kGaussianMean, range, clip_output);
  }
  if (name == "inverse_sensitivity_median") {
    return Mechanism(MechanismKind::kInverseSensitivityMedian, range,
                     clip_output);
  }
  if (name == "exact_mean") return Exact(Statistic::kMean);
  if (name == "exact_median") return Exact(Statistic::kMedian);
  throw ParameterError("unknown mechanism '" + std::string(name) + "'");
}

bool Mechanism::is_private() const {
  return kind_ != MechanismKind::kExactMean &&
         kind_ != MechanismKind::kExactMedian;
}

std::string_view Mechanism::name() const {
  switch (kind_) {
    case MechanismKind::kExactMean:
      return "exact_mean";
    case MechanismKind::kExactMedian:
      return "exact_median";
    case MechanismKind::kLaplaceMean:
      return "laplace_mean";
    case MechanismKind::kGaussianMean:
      return "gaussian_mean";
    case MechanismKind::kInverseSensitivityMedian:
      return "inverse_sensitivity_median";
  }
  return "unknown";
}

double Mechanism::Release(std::span<const double> data,
                          const PrivacyBudget& budget, Rng& rng) const {
  double value = 0.0;
  switch (kind_) {
    case MechanismKind::kExactMean:
      return Mean(data);
    case MechanismKind::kExactMedian:
      return Median(data);
    case MechanismKind::kLaplaceMean:
      value = LaplaceMean(data, range_, budget, rng);
      break;
    case MechanismKind::kGaussianMean:
      value = GaussianMean(data, range_, budget, rng);
      break;
    case MechanismKind::kInverseSensitivityMedian:
      return InverseSensitivityMedian(data, range_, budget, rng);
  }
  return clip_output_ ? range_.Clip(value) : value;
}

}  // namespace dp_resample
