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

#ifndef DP_RESAMPLE_CLI_H_
#define DP_RESAMPLE_CLI_H_

#include <ostream>

namespace dp_resample {

// Exit codes returned by Dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitRuntime = 4;

// Runs one subcommand (ci, budget, coverage, cdf). Results go to `out`,
// diagnostics to `err`. Files are written only at paths named by flags or by
// the experiment config.
int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_CLI_H_
