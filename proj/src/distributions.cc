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

#include "dp_resample/distributions.h"

#include <boost/math/special_functions/erf.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "dp_resample/errors.h"

namespace dp_resample {
namespace {

constexpr double kQuantileTolerance = 1e-10;
constexpr int kMaxRejectionAttempts = 1'000'000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double NormalPdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Inverse standard normal CDF.
double NormalQuantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double ExpDecay(double rate, double x) { return std::exp(-rate * x); }

// Base-law CDF (untruncated).
double BaseCdf(const DistributionSpec::Family& family, double x) {
  return std::visit(
      Overloaded{
          [x](const NormalFamily& f) { return NormalCdf((x - f.mu) / f.sigma); },
          [x](const ExponentialFamily& f) {
            return x <= 0.0 ? 0.0 : -std::expm1(-f.rate * x);
          },
          [x](const MixtureFamily& f) {
            double total = 0.0;
            for (std::size_t k = 0; k < f.means.size(); ++k) {
              total += f.weights[k] * NormalCdf((x - f.means[k]) / f.sigmas[k]);
            }
            return total;
          }},
      family);
}

double BasePdf(const DistributionSpec::Family& family, double x) {
  return std::visit(
      Overloaded{[x](const NormalFamily& f) {
                   return NormalPdf((x - f.mu) / f.sigma) / f.sigma;
                 },
                 [x](const ExponentialFamily& f) {
                   return x < 0.0 ? 0.0 : f.rate * ExpDecay(f.rate, x);
                 },
                 [x](const MixtureFamily& f) {
                   double total = 0.0;
                   for (std::size_t k = 0; k < f.means.size(); ++k) {
                     total += f.weights[k] *
                              NormalPdf((x - f.means[k]) / f.sigmas[k]) /
                              f.sigmas[k];
                   }
                   return total;
                 }},
      family);
}

void CheckBounds(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ParameterError("truncation bounds must be finite with lo < hi, got [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

// Truncated normal by inverse CDF. Works on the side of the mode that keeps
// the CDF differences well conditioned.
double SampleTruncatedNormal(double mu, double sigma, double lo, double hi,
                             Rng& rng) {
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  const double u = rng.UniformOpen();
  double z;
  if (a > 0.0) {
    // Upper tail: use survival functions Q(x) = Phi(-x).
    const double qa = NormalCdf(-a);
    const double qb = NormalCdf(-b);
    z = -NormalQuantile(qa - u * (qa - qb));
  } else {
    const double pa = NormalCdf(a);
    const double pb = NormalCdf(b);
    z = NormalQuantile(pa + u * (pb - pa));
  }
  return std::clamp(mu + sigma * z, lo, hi);
}

}  // namespace

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

DistributionSpec::DistributionSpec(Family family, double lo, double hi)
    : family_(std::move(family)), lo_(lo), hi_(hi) {
  mass_ = BaseCdf(family_, hi_) - BaseCdf(family_, lo_);
  if (!(mass_ > 0.0)) {
    throw ParameterError("truncation interval carries no probability mass");
  }
}

DistributionSpec DistributionSpec::TruncatedNormal(double mu, double sigma,
                                                   double lo, double hi) {
  CheckBounds(lo, hi);
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("truncated_normal requires finite mu and sigma > 0");
  }
  return DistributionSpec(NormalFamily{mu, sigma}, lo, hi);
}

DistributionSpec DistributionSpec::TruncatedExponential(double rate, double hi,
                                                        double lo) {
  CheckBounds(lo, hi);
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ParameterError("truncated_exponential requires rate > 0");
  }
  if (lo < 0.0) {
    throw ParameterError("truncated_exponential requires lo >= 0");
  }
  return DistributionSpec(ExponentialFamily{rate}, lo, hi);
}

DistributionSpec DistributionSpec::TruncatedMixture(std::vector<double> means,
                                                    std::vector<double> sigmas,
                                                    std::vector<double> weights,
                                                    double lo, double hi) {
  CheckBounds(lo, hi);
  if (means.empty() || means.size() != sigmas.size() ||
      means.size() != weights.size()) {
    throw ParameterError(
        "truncated_mixture requires equally sized, nonempty means, sigmas and "
        "weights");
  }
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (!std::isfinite(means[k]) || !(sigmas[k] > 0.0) ||
        !std::isfinite(sigmas[k])) {
      throw ParameterError("mixture components need finite means, sigmas > 0");
    }
    if (!(weights[k] >= 0.0)) {
      throw ParameterError("mixture weights must be nonnegative");
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ParameterError("mixture weights must sum to 1");
  }
  return DistributionSpec(
      MixtureFamily{std::move(means), std::move(sigmas), std::move(weights)},
      lo, hi);
}

std::string DistributionSpec::kind() const {
  return std::visit(Overloaded{[](const NormalFamily&) {
                                 return std::string("truncated_normal");
                               },
                               [](const ExponentialFamily&) {
                                 return std::string("truncated_exponential");
                               },
                               [](const MixtureFamily&) {
                                 return std::string("truncated_mixture");
                               }},
                    family_);
}

double DistributionSpec::Cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  if (const auto* e = std::get_if<ExponentialFamily>(&family_)) {
    // (e^{-r lo} - e^{-r x}) / (e^{-r lo} - e^{-r hi}) without cancellation.
    return std::expm1(-e->rate * (x - lo_)) / std::expm1(-e->rate * (hi_ - lo_));
  }
  return std::clamp((BaseCdf(family_, x) - BaseCdf(family_, lo_)) / mass_, 0.0,
                    1.0);
}

double DistributionSpec::DensityUnchecked(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  if (const auto* e = std::get_if<ExponentialFamily>(&family_)) {
    return e->rate * std::exp(-e->rate * (x - lo_)) /
           -std::expm1(-e->rate * (hi_ - lo_));
  }
  return BasePdf(family_, x) / mass_;
}

std::vector<double> SampleValues(const DistributionSpec& spec, std::size_t n,
                                 Rng& rng) {
  std::vector<double> out;
  out.reserve(n);
  const double lo = spec.lo();
  const double hi = spec.hi();
  std::visit(
      Overloaded{
          [&](const NormalFamily& f) {
            for (std::size_t i = 0; i < n; ++i) {
              out.push_back(SampleTruncatedNormal(f.mu, f.sigma, lo, hi, rng));
            }
          },
          [&](const ExponentialFamily& f) {
            const double span_mass = std::expm1(-f.rate * (hi - lo));
            for (std::size_t i = 0; i < n; ++i) {
              const double u = rng.Uniform();
              const double x = lo - std::log1p(u * span_mass) / f.rate;
              out.push_back(std::clamp(x, lo, hi));
            }
          },
          [&](const MixtureFamily& f) {
            std::vector<double> cumulative(f.weights.size());
            std::partial_sum(f.weights.begin(), f.weights.end(),
                             cumulative.begin());
            for (std::size_t i = 0; i < n; ++i) {
              int attempts = 0;
              while (true) {
                if (++attempts > kMaxRejectionAttempts) {
                  throw DomainError("mixture rejection sampler made no progress");
                }
                const double u = rng.Uniform() * cumulative.back();
                std::size_t k = 0;
                while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
                const double x = f.means[k] + f.sigmas[k] * rng.StandardNormal();
                if (x >= lo && x <= hi) {
                  out.push_back(x);
                  break;
                }
              }
            }
          }},
      spec.family());
  return out;
}

Dataset Sample(const DistributionSpec& spec, std::size_t n, uint64_t seed) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  Rng rng(seed);
  return Dataset{SampleValues(spec, n, rng), spec};
}

double TrueQuantile(const DistributionSpec& spec, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("quantile level must lie in (0, 1)");
  }
  double lo = spec.lo();
  double hi = spec.hi();
  while (hi - lo > kQuantileTolerance * 1e-2) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (spec.Cdf(mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double TrueMean(const DistributionSpec& spec) {
  const double lo = spec.lo();
  const double hi = spec.hi();
  return std::visit(
      Overloaded{
          [&](const NormalFamily& f) {
            const double a = (lo - f.mu) / f.sigma;
            const double b = (hi - f.mu) / f.sigma;
            return f.mu + f.sigma * (NormalPdf(a) - NormalPdf(b)) /
                              (NormalCdf(b) - NormalCdf(a));
          },
          [&](const ExponentialFamily& f) {
            const double width = hi - lo;
            // lo + 1/r - w e^{-r w} / (1 - e^{-r w})
            return lo + 1.0 / f.rate +
                   width * std::exp(-f.rate * width) /
                       std::expm1(-f.rate * width);
          },
          [&](const MixtureFamily& f) {
            double weighted = 0.0;
            double mass = 0.0;
            for (std::size_t k = 0; k < f.means.size(); ++k) {
              const double a = (lo - f.means[k]) / f.sigmas[k];
              const double b = (hi - f.means[k]) / f.sigmas[k];
              const double zk = NormalCdf(b) - NormalCdf(a);
              const double mk = f.means[k] + f.sigmas[k] *
                                                 (NormalPdf(a) - NormalPdf(b)) /
                                                 zk;
              weighted += f.weights[k] * zk * mk;
              mass += f.weights[k] * zk;
            }
            return weighted / mass;
          }},
      spec.family());
}

double DensityAt(const DistributionSpec& spec, double x) {
  if (!(x >= spec.lo() && x <= spec.hi())) {
    throw DomainError("density evaluated outside the truncation support");
  }
  return spec.DensityUnchecked(x);
}

double LimitingSdMedian(const DistributionSpec& spec) {
  const double f = DensityAt(spec, TrueQuantile(spec, 0.5));
  if (!(f > 0.0)) {
    throw DomainError("zero density at the median: degenerate limit law");
  }
  return 1.0 / (2.0 * f);
}

double LimitingCdfMedian(const DistributionSpec& spec, double x) {
  const double sd = LimitingSdMedian(spec);
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return NormalCdf(x / sd);
}

}  // namespace dp_resample
