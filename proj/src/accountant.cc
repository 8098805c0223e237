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

#include "dp_resample/accountant.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dp_resample/errors.h"

namespace dp_resample {
namespace {

using Real = long double;

constexpr Real kCalibrationUpper = 64.0L;
constexpr int kBisectionSteps = 256;

double CapDelta(Real delta) {
  return static_cast<double>(std::min<Real>(delta, 1.0L));
}

void CheckSubsample(std::size_t m, std::size_t n) {
  if (m < 1 || m > n) {
    throw ParameterError("subsample size must satisfy 1 <= m <= n (m=" +
                         std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
}

void CheckBudget(const PrivacyBudget& b) { PrivacyBudget::Make(b.epsilon, b.delta); }

Real AmplifiedEpsilon(Real epsilon, Real fraction) {
  return std::log1p(fraction * std::expm1(epsilon));
}

Real AdvancedEpsilon(Real epsilon, std::size_t k, Real delta_slack) {
  if (epsilon == 0.0L) return 0.0L;
  const Real kk = static_cast<Real>(k);
  // (e^eps - 1) / (e^eps + 1) == tanh(eps / 2)
  return epsilon * (std::sqrt(2.0L * kk * std::log(1.0L / delta_slack)) +
                    kk * std::tanh(epsilon / 2.0L));
}

Real TotalEpsilon(Real center_epsilon, Real per_call_epsilon, std::size_t m,
                  std::size_t n, std::size_t count,
                  const CompositionMode& mode) {
  const Real fraction = static_cast<Real>(m) / static_cast<Real>(n);
  const Real amp = AmplifiedEpsilon(per_call_epsilon, fraction);
  const Real composed =
      mode.is_advanced() ? AdvancedEpsilon(amp, count, mode.delta_slack)
                         : static_cast<Real>(count) * amp;
  return composed + center_epsilon;
}

}  // namespace

CompositionMode CompositionMode::Advanced(double delta_slack) {
  if (!(delta_slack > 0.0 && delta_slack < 1.0)) {
    throw ParameterError("advanced composition needs delta slack in (0, 1)");
  }
  return {Kind::kAdvanced, delta_slack};
}

CompositionMode::Kind ParseCompositionKind(std::string_view name) {
  if (name == "basic") return CompositionMode::Kind::kBasic;
  if (name == "advanced") return CompositionMode::Kind::kAdvanced;
  throw ParameterError("unknown composition mode '" + std::string(name) + "'");
}

void PrivSubBudget::Validate() const {
  CheckSubsample(m, n);
  if (num_subsamples < 1) throw ParameterError("T must be at least 1");
  CheckBudget(center);
  CheckBudget(per_subsample);
  if (mode.is_advanced()) CompositionMode::Advanced(mode.delta_slack);
}

PrivacyBudget Amplify(const PrivacyBudget& budget, std::size_t m,
                      std::size_t n) {
  CheckSubsample(m, n);
  CheckBudget(budget);
  if (m == n) return budget;
  const Real fraction = static_cast<Real>(m) / static_cast<Real>(n);
  return PrivacyBudget{
      static_cast<double>(AmplifiedEpsilon(budget.epsilon, fraction)),
      static_cast<double>(fraction * static_cast<Real>(budget.delta))};
}

PrivacyBudget ComposeBasic(const PrivacyBudget& budget, std::size_t k) {
  if (k < 1) throw ParameterError("composition count must be at least 1");
  CheckBudget(budget);
  const Real kk = static_cast<Real>(k);
  return PrivacyBudget{static_cast<double>(kk * budget.epsilon),
                       CapDelta(kk * budget.delta)};
}

PrivacyBudget ComposeAdvanced(const PrivacyBudget& budget, std::size_t k,
                              double delta_slack) {
  if (k < 1) throw ParameterError("composition count must be at least 1");
  if (!(delta_slack > 0.0 && delta_slack < 1.0)) {
    throw ParameterError("advanced composition needs delta slack in (0, 1)");
  }
  CheckBudget(budget);
  const Real kk = static_cast<Real>(k);
  return PrivacyBudget{
      static_cast<double>(AdvancedEpsilon(budget.epsilon, k, delta_slack)),
      CapDelta(kk * budget.delta + delta_slack)};
}

PrivacyBudget AmplifiedPerSubsample(const PrivSubBudget& budget) {
  budget.Validate();
  return Amplify(budget.per_subsample, budget.m, budget.n);
}

PrivacyBudget PrivSubTotal(const PrivSubBudget& budget) {
  budget.Validate();
  const Real fraction =
      static_cast<Real>(budget.m) / static_cast<Real>(budget.n);
  const Real count = static_cast<Real>(budget.num_subsamples);
  const Real epsilon =
      TotalEpsilon(budget.center.epsilon, budget.per_subsample.epsilon,
                   budget.m, budget.n, budget.num_subsamples, budget.mode);
  Real delta = count * fraction * static_cast<Real>(budget.per_subsample.delta) +
               static_cast<Real>(budget.center.delta);
  if (budget.mode.is_advanced()) delta += budget.mode.delta_slack;
  return PrivacyBudget{static_cast<double>(epsilon), CapDelta(delta)};
}

PrivSubBudget Calibrate(const PrivacyBudget& target, std::size_t m,
                        std::size_t n, std::size_t num_subsamples,
                        double split, CompositionMode::Kind mode) {
  CheckSubsample(m, n);
  CheckBudget(target);
  if (num_subsamples < 1) throw ParameterError("T must be at least 1");
  if (!(target.epsilon > 0.0) || !std::isfinite(target.epsilon)) {
    throw ParameterError("calibration needs a finite target epsilon > 0");
  }
  if (!(split > 0.0 && split < 1.0)) {
    throw ParameterError("budget split must lie in (0, 1)");
  }

  PrivSubBudget out;
  out.m = m;
  out.n = n;
  out.num_subsamples = num_subsamples;

  const Real fraction = static_cast<Real>(m) / static_cast<Real>(n);
  const Real count = static_cast<Real>(num_subsamples);
  const Real remaining_delta = (1.0L - split) * static_cast<Real>(target.delta);
  Real amplified_delta_total = remaining_delta;
  if (mode == CompositionMode::Kind::kAdvanced) {
    if (!(target.delta > 0.0)) {
      throw ParameterError(
          "advanced composition requires a target delta > 0 to allocate the "
          "slack");
    }
    out.mode = CompositionMode::Advanced(static_cast<double>(remaining_delta / 2));
    amplified_delta_total = remaining_delta / 2;
  } else {
    out.mode = CompositionMode::Basic();
  }
  const Real per_delta = amplified_delta_total / (count * fraction);
  if (per_delta > 1.0L) {
    throw ParameterError("calibrated per-subsample delta exceeds 1");
  }
  out.center = PrivacyBudget{split * target.epsilon, split * target.delta};
  out.per_subsample.delta = static_cast<double>(per_delta);

  const Real center_epsilon = out.center.epsilon;
  const Real goal = target.epsilon;
  Real lo = 0.0L;
  Real hi = kCalibrationUpper;
  if (TotalEpsilon(center_epsilon, hi, m, n, num_subsamples, out.mode) < goal) {
    throw ParameterError("target epsilon unreachable with epsilon' <= 64");
  }
  for (int step = 0; step < kBisectionSteps && hi - lo > 0.0L; ++step) {
    const Real mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (TotalEpsilon(center_epsilon, mid, m, n, num_subsamples, out.mode) <
        goal) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick whichever endpoint (after rounding to double) lands closest.
  const double candidates[2] = {static_cast<double>(lo), static_cast<double>(hi)};
  double best = candidates[0];
  Real best_err = -1.0L;
  for (double c : candidates) {
    const Real err = std::abs(
        TotalEpsilon(center_epsilon, c, m, n, num_subsamples, out.mode) - goal);
    if (best_err < 0.0L || err < best_err) {
      best = c;
      best_err = err;
    }
  }
  out.per_subsample.epsilon = best;
  return out;
}

}  // namespace dp_resample
