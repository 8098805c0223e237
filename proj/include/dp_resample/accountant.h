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

#ifndef DP_RESAMPLE_ACCOUNTANT_H_
#define DP_RESAMPLE_ACCOUNTANT_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "dp_resample/mechanisms.h"

namespace dp_resample {

struct CompositionMode {
  enum class Kind { kBasic, kAdvanced };

  Kind kind = Kind::kBasic;
  // Only meaningful for kAdvanced; must be > 0 there.
  double delta_slack = 0.0;

  static CompositionMode Basic() { return {Kind::kBasic, 0.0}; }
  static CompositionMode Advanced(double delta_slack);

  bool is_advanced() const { return kind == Kind::kAdvanced; }
  std::string name() const { return is_advanced() ? "advanced" : "basic"; }
};

// Budgets of one subsampling run: the full-sample call at `center`, and T
// calls at `per_subsample` on subsets of size m out of n.
struct PrivSubBudget {
  PrivacyBudget center;
  PrivacyBudget per_subsample;
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t num_subsamples = 1;
  CompositionMode mode;

  // Throws ParameterError unless 1 <= m <= n and num_subsamples >= 1.
  void Validate() const;
};

// Amplification by subsampling m of n without replacement:
// (log(1 + (m/n)(e^eps - 1)), (m/n) delta).
PrivacyBudget Amplify(const PrivacyBudget& budget, std::size_t m,
                      std::size_t n);

// (k eps, min(k delta, 1)).
PrivacyBudget ComposeBasic(const PrivacyBudget& budget, std::size_t k);

// Advanced composition with slack delta' in (0, 1):
// eps * (sqrt(2k log(1/delta')) + k (e^eps - 1) / (e^eps + 1)),
// min(k delta + delta', 1).
PrivacyBudget ComposeAdvanced(const PrivacyBudget& budget, std::size_t k,
                              double delta_slack);

// End-to-end guarantee: compose the amplified per-subsample budget T times
// (basic or advanced) and add the center budget.
PrivacyBudget PrivSubTotal(const PrivSubBudget& budget);

// Amplified per-call budget of a PrivSubBudget.
PrivacyBudget AmplifiedPerSubsample(const PrivSubBudget& budget);

// Splits a total budget: the center gets split * target, and the per-subsample
// epsilon' is found by bisection on [0, 64] so that PrivSubTotal matches the
// target epsilon. The remaining (1 - split) * delta goes to the subsample
// calls in basic mode, and is halved between delta'' and T * delta_amp in
// advanced mode (which therefore needs target.delta > 0).
PrivSubBudget Calibrate(const PrivacyBudget& target, std::size_t m,
                        std::size_t n, std::size_t num_subsamples,
                        double split, CompositionMode::Kind mode);

CompositionMode::Kind ParseCompositionKind(std::string_view name);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_ACCOUNTANT_H_
