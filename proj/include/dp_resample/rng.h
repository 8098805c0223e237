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

#ifndef DP_RESAMPLE_RNG_H_
#define DP_RESAMPLE_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace dp_resample {

// Seedable random stream. Wraps std::mt19937_64 (whose output sequence is
// fixed by the standard) and implements every derived draw itself, so results
// are identical across standard library implementations.
//
// Independent child streams are derived from a root seed and a path of
// counters (replication id, subsample id, mechanism-call id, ...). Derivation
// is a pure function of its inputs, which makes parallel schedules
// reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  static Rng Derive(uint64_t root, std::initializer_list<uint64_t> path);

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Uniform on the open interval (0, 1).
  double UniformOpen();

  // Uniform integer in [0, bound). bound must be positive.
  uint64_t UniformInt(uint64_t bound);

  // Standard normal draw by inverse-CDF transform of one open uniform.
  double StandardNormal();

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Mixes a path of values into a single 64-bit seed.
uint64_t DeriveSeed(uint64_t root, std::initializer_list<uint64_t> path);

// FNV-1a hash, used to turn string identifiers into seed path components.
uint64_t HashString(std::string_view s);

}  // namespace dp_resample

#endif  // DP_RESAMPLE_RNG_H_
