// Copyright 2026 The vadet Authors
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

#ifndef VADET__RANDOM_HPP_
#define VADET__RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace vadet {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

/// Seed of an independent substream identified by `keys` under `seed`. Lets
/// per-frame / per-object draws stay identical regardless of thread schedule.
constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                       std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t s = mix_seed(seed);
  for (const auto k : keys) {
    s = mix_seed(s ^ mix_seed(k + 0x632BE59BD9B4E019ULL));
  }
  return s;
}

/// Uniform double in [0, 1) built from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; platform independent, unlike std::normal_distribution.
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) {
    u1 = uniform01(rng);
  }
  const double u2 = uniform01(rng);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace vadet

#endif  // VADET__RANDOM_HPP_
