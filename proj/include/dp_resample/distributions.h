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

#ifndef DP_RESAMPLE_DISTRIBUTIONS_H_
#define DP_RESAMPLE_DISTRIBUTIONS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dp_resample/rng.h"

namespace dp_resample {

struct NormalFamily {
  double mu;
  double sigma;
};

struct ExponentialFamily {
  double rate;
};

struct MixtureFamily {
  std::vector<double> means;
  std::vector<double> sigmas;
  std::vector<double> weights;
};

// A synthetic population truncated to [lo, hi]. All three families have a
// continuous, strictly increasing CDF on the support, so quantiles are unique.
// Construction validates the invariants and throws ParameterError.
class DistributionSpec {
 public:
  using Family = std::variant<NormalFamily, ExponentialFamily, MixtureFamily>;

  static DistributionSpec TruncatedNormal(double mu, double sigma, double lo,
                                          double hi);
  // The exponential base law lives on [0, inf), so lo must be >= 0.
  static DistributionSpec TruncatedExponential(double rate, double hi,
                                               double lo = 0.0);
  static DistributionSpec TruncatedMixture(std::vector<double> means,
                                           std::vector<double> sigmas,
                                           std::vector<double> weights,
                                           double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const Family& family() const { return family_; }

  // "truncated_normal", "truncated_exponential" or "truncated_mixture".
  std::string kind() const;

  // Truncated CDF; clamps to 0 below lo and 1 above hi.
  double Cdf(double x) const;

  // Truncated density without the support check.
  double DensityUnchecked(double x) const;

 private:
  DistributionSpec(Family family, double lo, double hi);

  Family family_;
  double lo_;
  double hi_;
  // Untruncated base-law mass inside [lo, hi]: normalizer of the density.
  double mass_;
};

struct Dataset {
  std::vector<double> values;
  std::optional<DistributionSpec> source;

  std::size_t size() const { return values.size(); }
};

// n i.i.d. draws from the truncated law. Normal and exponential use the
// inverse-CDF transform; the mixture picks a component by weight and rejects
// draws outside [lo, hi] (restarting from component selection).
Dataset Sample(const DistributionSpec& spec, std::size_t n, uint64_t seed);
std::vector<double> SampleValues(const DistributionSpec& spec, std::size_t n,
                                 Rng& rng);

// The unique x with Cdf(x) = q, by bisection on [lo, hi] to 1e-10.
double TrueQuantile(const DistributionSpec& spec, double q);

// Mean of the truncated law in closed form.
double TrueMean(const DistributionSpec& spec);

// Truncated density. Throws DomainError outside [lo, hi].
double DensityAt(const DistributionSpec& spec, double x);

// Limiting CDF of sqrt(n) * (median - true median), i.e. the CDF of
// N(0, 1 / (4 f(median)^2)). Throws DomainError when the density at the true
// median vanishes.
double LimitingCdfMedian(const DistributionSpec& spec, double x);

// Standard deviation of the limit law above: 1 / (2 f(median)).
double LimitingSdMedian(const DistributionSpec& spec);

// Standard normal CDF.
double NormalCdf(double x);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_DISTRIBUTIONS_H_
