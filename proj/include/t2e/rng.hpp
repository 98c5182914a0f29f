// Copyright 2026 The T2E Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef T2E_RNG_HPP_
#define T2E_RNG_HPP_

#include <cstdint>
#include <numbers>
#include <random>

namespace t2e {

/// Portable seeded generator.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// derives every distribution by hand so draws are identical on every
/// platform and standard library. The std:: distributions are not used
/// because their algorithms are implementation-defined.
///
/// State-advance order inside an episode: spawn draws first, then policy
/// draws in step order, robot index order within a step.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Uniform heading in [-pi, pi).
  double heading() { return uniform(-std::numbers::pi, std::numbers::pi); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace t2e

#endif  // T2E_RNG_HPP_
