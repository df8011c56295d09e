// Copyright 2026 qeclab authors.
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

#ifndef QEC_RNG_HPP
#define QEC_RNG_HPP

// Deterministic, platform-independent randomness for the whole project.
//
// One generator algorithm is fixed repo-wide: xoshiro256** seeded through
// SplitMix64.  Every experiment derives its streams from a single master
// seed, so identical (seed, inputs) reproduce identical bit streams on any
// platform.  Substream k of a stream with seed s is seeded with the
// (k+1)-th SplitMix64 output for state s, which has the closed form
// finalize(s + (k+1)*GAMMA).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace qec {

namespace detail {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

struct SplitMix64 {
  std::uint64_t state = 0;

  constexpr std::uint64_t next() {
    state += detail::kSplitMixGamma;
    return detail::splitmix_finalize(state);
  }
};

// The (index+1)-th SplitMix64 output for `seed`, in closed form.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::splitmix_finalize(seed + (index + 1) * detail::kSplitMixGamma);
}

// xoshiro256** by Blackman & Vigna, state filled from SplitMix64.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) : seed_(seed) {
    SplitMix64 sm{seed};
    for (auto& word : state_) word = sm.next();
  }

  constexpr std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n) via 128-bit multiply (Lemire reduction,
  // without rejection; bias is < 2^-64 and irrelevant for simulation).
  std::uint64_t below(std::uint64_t n) {
    const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  // Standard normal via Box-Muller; the paired value is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream; index selects the substream deterministically.
  Rng substream(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qec

#endif  // QEC_RNG_HPP
