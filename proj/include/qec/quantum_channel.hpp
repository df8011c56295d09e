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

#ifndef QEC_QUANTUM_CHANNEL_HPP
#define QEC_QUANTUM_CHANNEL_HPP

// Simulates per-step measurements of a (possibly imperfect) two-qubit state
// shared between a sensor and an actuator.  Each bit pair is drawn i.i.d.
// from the joint law given by the state's squared amplitudes, so the two
// parties obtain correlated key strings that disagree with probability
// p = |b|^2 + |c|^2 per position.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/rng.hpp"
#include "qec/stats.hpp"

namespace qec {

class BellStateSpec {
 public:
  // Amplitudes of |00>, |01>, |10>, |11>; must be normalized to 1e-12.
  BellStateSpec(std::complex<double> a, std::complex<double> b, std::complex<double> c,
                std::complex<double> d)
      : a_(a), b_(b), c_(c), d_(d) {
    const double norm2 = std::norm(a_) + std::norm(b_) + std::norm(c_) + std::norm(d_);
    if (std::abs(norm2 - 1.0) > 1e-12)
      throw std::invalid_argument("BellStateSpec: amplitudes not normalized (|.|^2 sum = " +
                                  std::to_string(norm2) + ")");
  }

  // Symmetric state (|a| = |d|, |b| = |c|) with a prescribed mismatch
  // probability.  For these states the flip events are independent of the
  // sensor bits, which the later error model relies on.
  static BellStateSpec symmetric_with_error(double p) {
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("BellStateSpec: error probability outside [0,1]");
    const double matched = std::sqrt((1.0 - p) / 2.0);
    const double flipped = std::sqrt(p / 2.0);
    return BellStateSpec(matched, flipped, flipped, matched);
  }

  static BellStateSpec perfect() { return symmetric_with_error(0.0); }

  std::complex<double> a() const { return a_; }
  std::complex<double> b() const { return b_; }
  std::complex<double> c() const { return c_; }
  std::complex<double> d() const { return d_; }

  double p00() const { return std::norm(a_); }
  double p01() const { return std::norm(b_); }
  double p10() const { return std::norm(c_); }
  double p11() const { return std::norm(d_); }

  bool symmetric() const {
    return std::abs(std::abs(a_) - std::abs(d_)) <= 1e-12 &&
           std::abs(std::abs(b_) - std::abs(c_)) <= 1e-12;
  }

 private:
  std::complex<double> a_, b_, c_, d_;
};

// Probability that a sensor bit and the corresponding actuator bit disagree.
inline double error_probability(const BellStateSpec& state) {
  return state.p01() + state.p10();
}

// Per-step key strings at both parties.  Bits are stored in transmission
// order: n groups of w_b bits, most significant bit of each group first.
struct QuantumKeyPair {
  std::uint64_t t = 0;
  int n = 0;
  int w_b = 0;
  std::vector<std::uint8_t> sensor_bits;
  std::vector<std::uint8_t> actuator_bits;

  int length() const { return n * w_b; }

  // Bits of group `i` (0-based), most significant first.
  std::span<const std::uint8_t> sensor_group(int i) const {
    return {sensor_bits.data() + static_cast<std::size_t>(i) * w_b, static_cast<std::size_t>(w_b)};
  }
  std::span<const std::uint8_t> actuator_group(int i) const {
    return {actuator_bits.data() + static_cast<std::size_t>(i) * w_b,
            static_cast<std::size_t>(w_b)};
  }
};

inline QuantumKeyPair sample_key_pair(const BellStateSpec& state, int n, int w_b, std::uint64_t t,
                                      Rng& rng) {
  if (n < 1 || w_b < 1) throw std::invalid_argument("sample_key_pair: need n >= 1 and w_b >= 1");
  QuantumKeyPair pair;
  pair.t = t;
  pair.n = n;
  pair.w_b = w_b;
  const int total = n * w_b;
  pair.sensor_bits.resize(total);
  pair.actuator_bits.resize(total);
  const double p00 = state.p00();
  const double p01 = state.p01();
  const double p10 = state.p10();
  for (int idx = 0; idx < total; ++idx) {
    const double u = rng.uniform01();
    std::uint8_t se, ac;
    if (u < p00) {
      se = 0; ac = 0;
    } else if (u < p00 + p01) {
      se = 0; ac = 1;
    } else if (u < p00 + p01 + p10) {
      se = 1; ac = 0;
    } else {
      se = 1; ac = 1;
    }
    pair.sensor_bits[idx] = se;
    pair.actuator_bits[idx] = ac;
  }
  return pair;
}

namespace detail {

inline std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  const std::size_t nbytes = (bits.size() + 7) / 8;
  out.reserve(nbytes * 2);
  for (std::size_t byte = 0; byte < nbytes; ++byte) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      v <<= 1;
      const std::size_t idx = byte * 8 + k;
      if (idx < bits.size()) v |= bits[idx];
    }
    out.push_back(kHex[v >> 4]);
    out.push_back(kHex[v & 0xF]);
  }
  return out;
}

}  // namespace detail

// Debug dump: `t=<u64> se=<hex> ac=<hex>`, bits packed MSB-first per group,
// groups concatenated, zero-padded to a byte boundary.
inline std::string dump_key_pair(const QuantumKeyPair& pair) {
  return "t=" + std::to_string(pair.t) + " se=" + detail::bits_to_hex(pair.sensor_bits) +
         " ac=" + detail::bits_to_hex(pair.actuator_bits);
}

struct BitStatistics {
  std::size_t total_bits = 0;
  std::vector<double> position_frequency;  // sensor marginal per position
  double sensor_one_frequency = 0.0;
  double flip_rate = 0.0;
  // 2x2 chi-square of flip events against sensor bit values.
  double flip_independence_statistic = 0.0;
  double flip_independence_pvalue = 1.0;
  // Uniformity of flips across bit positions.
  double position_uniformity_statistic = 0.0;
  double position_uniformity_pvalue = 1.0;
};

inline BitStatistics empirical_bit_statistics(std::span<const QuantumKeyPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("empirical_bit_statistics: empty input");
  const int positions = pairs.front().length();
  std::size_t total = 0;
  for (const QuantumKeyPair& p : pairs) {
    if (p.length() != positions)
      throw std::invalid_argument("empirical_bit_statistics: inconsistent key lengths");
    total += static_cast<std::size_t>(p.length());
  }
  if (total < 1000)
    throw std::invalid_argument("empirical_bit_statistics: need at least 1000 bits");

  BitStatistics stats;
  stats.total_bits = total;
  stats.position_frequency.assign(positions, 0.0);
  std::vector<double> flips_per_position(positions, 0.0);

  // counts[sensor][flip]
  double counts[2][2] = {{0, 0}, {0, 0}};
  for (const QuantumKeyPair& p : pairs) {
    for (int idx = 0; idx < positions; ++idx) {
      const unsigned se = p.sensor_bits[idx];
      const unsigned flip = (p.sensor_bits[idx] != p.actuator_bits[idx]) ? 1u : 0u;
      counts[se][flip] += 1.0;
      stats.position_frequency[idx] += se;
      flips_per_position[idx] += flip;
    }
  }
  const double per_position = static_cast<double>(pairs.size());
  for (double& f : stats.position_frequency) f /= per_position;

  const double n_total = static_cast<double>(total);
  const double ones = counts[1][0] + counts[1][1];
  const double flips = counts[0][1] + counts[1][1];
  stats.sensor_one_frequency = ones / n_total;
  stats.flip_rate = flips / n_total;

  // Chi-square with 1 dof on the 2x2 contingency table, guarded against
  // degenerate margins (e.g. a perfect state has no flips at all).
  const double row0 = counts[0][0] + counts[0][1];
  const double row1 = counts[1][0] + counts[1][1];
  const double col0 = counts[0][0] + counts[1][0];
  const double col1 = counts[0][1] + counts[1][1];
  if (row0 > 0 && row1 > 0 && col0 > 0 && col1 > 0) {
    double stat = 0.0;
    const double table[2][2] = {{row0 * col0, row0 * col1}, {row1 * col0, row1 * col1}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double expected = table[i][j] / n_total;
        const double d = counts[i][j] - expected;
        stat += d * d / expected;
      }
    stats.flip_independence_statistic = stat;
    stats.flip_independence_pvalue = chi_square_pvalue(stat, 1);
  }

  if (flips > 0 && positions > 1) {
    const double expected = flips / positions;
    double stat = 0.0;
    for (double f : flips_per_position) {
      const double d = f - expected;
      stat += d * d / expected;
    }
    stats.position_uniformity_statistic = stat;
    stats.position_uniformity_pvalue = chi_square_pvalue(stat, positions - 1);
  }
  return stats;
}

}  // namespace qec

#endif  // QEC_QUANTUM_CHANNEL_HPP
