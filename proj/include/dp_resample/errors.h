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

#ifndef DP_RESAMPLE_ERRORS_H_
#define DP_RESAMPLE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dp_resample {

// Base class for every error raised by the library. The subclasses map onto
// the failure categories callers need to tell apart (the CLI turns them into
// distinct exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (empty dataset,
// evaluation point outside the support, degenerate limit).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid numeric parameter (budget, subsample size, slack, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A sampling or splitting plan that violates its invariants.
class PlanError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File system failures, always carrying the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dp_resample

#endif  // DP_RESAMPLE_ERRORS_H_
