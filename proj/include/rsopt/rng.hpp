// Copyright 2026 The rsopt Authors.
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


#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace rsopt {

/// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The distributions are implemented here rather than taken from <random>
/// because the standard leaves their algorithms unspecified:
///   uniform()        53 high bits of one draw, scaled by 2^-53, in [0, 1)
///   uniform_index(n) rejection sampling on the top bits, unbiased
///   normal()         Box-Muller on two uniforms, second value cached
/// split(stream) derives a child generator from the root seed only, so the
/// child stream does not depend on how much of the parent was consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  bool coin() { return (engine_() >> 63) != 0; }

  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace rsopt
