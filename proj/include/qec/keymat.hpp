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

#ifndef QEC_KEYMAT_HPP
#define QEC_KEYMAT_HPP

// Turns raw key bits into per-dimension multipliers.  The plain variant maps
// each w_b-bit group to a nonzero integer uniform on
// [-2^(w_b-1), 2^(w_b-1)] \ {0}:
//
//   beta = -(2^(w_b-1)+1) * b_(w_b-1) + sum_{j=0}^{w_b-2} 2^j b_j + 1.
//
// The quantized variant adds a sign-matched offset xbar/ln(1+alpha) that
// keeps the exponent of the later encryption step inside the quantizer's
// admissible range.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qec/quantum_channel.hpp"

namespace qec {

enum class KeyVariant { plain, quantized };
enum class KeySide { sensor, actuator };

struct KeyCoefficients {
  std::uint64_t t = 0;
  KeyVariant variant = KeyVariant::plain;
  std::vector<double> betas;

  int dims() const { return static_cast<int>(betas.size()); }
};

// Bits are given most significant first: bits[0] = b_(w_b-1).
inline std::int64_t beta_plain(std::span<const std::uint8_t> group_bits) {
  const int w_b = static_cast<int>(group_bits.size());
  if (w_b < 1 || w_b > 62) throw std::invalid_argument("beta_plain: bad group width");
  std::int64_t value = 1 - (group_bits[0] ? (std::int64_t{1} << (w_b - 1)) + 1 : 0);
  for (int j = 0; j <= w_b - 2; ++j)
    value += static_cast<std::int64_t>(group_bits[w_b - 1 - j]) << j;
  return value;
}

inline double beta_quantized(std::span<const std::uint8_t> group_bits, double alpha,
                             double xbar) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("beta_quantized: alpha must lie in (0, 1]");
  if (!(xbar > 0.0)) throw std::invalid_argument("beta_quantized: xbar must be positive");
  const double offset = xbar / std::log1p(alpha);
  const std::int64_t integer_part = beta_plain(group_bits);
  return static_cast<double>(integer_part) + (group_bits[0] ? -offset : offset);
}

struct BetaMoments {
  double mean_square = 0.0;          // E[beta^2]
  double mean_inverse_square = 0.0;  // E[1/beta^2]
};

// Exact moments of the plain variant under uniform bits, by enumeration of
// all 2^w_b bit patterns.
inline BetaMoments beta_moments(int w_b) {
  if (w_b < 1) throw std::invalid_argument("beta_moments: w_b must be >= 1");
  if (w_b > 24) throw std::invalid_argument("beta_moments: enumeration guard (w_b <= 24)");
  const std::uint32_t patterns = 1u << w_b;
  std::vector<std::uint8_t> bits(w_b);
  double sum_sq = 0.0;
  double sum_inv_sq = 0.0;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    for (int k = 0; k < w_b; ++k) bits[k] = (mask >> (w_b - 1 - k)) & 1u;
    const auto beta = static_cast<double>(beta_plain(bits));
    sum_sq += beta * beta;
    sum_inv_sq += 1.0 / (beta * beta);
  }
  return BetaMoments{sum_sq / patterns, sum_inv_sq / patterns};
}

// E[beta^2] for the quantized variant under uniform bits.
inline double beta_quantized_mean_square(int w_b, double alpha, double xbar) {
  if (w_b < 1 || w_b > 24) throw std::invalid_argument("beta_quantized_mean_square: bad w_b");
  const std::uint32_t patterns = 1u << w_b;
  std::vector<std::uint8_t> bits(w_b);
  double sum_sq = 0.0;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    for (int k = 0; k < w_b; ++k) bits[k] = (mask >> (w_b - 1 - k)) & 1u;
    const double beta = beta_quantized(bits, alpha, xbar);
    sum_sq += beta * beta;
  }
  return sum_sq / patterns;
}

inline KeyCoefficients plain_coefficients(const QuantumKeyPair& pair, KeySide side) {
  KeyCoefficients out;
  out.t = pair.t;
  out.variant = KeyVariant::plain;
  out.betas.resize(pair.n);
  for (int i = 0; i < pair.n; ++i) {
    const auto group = (side == KeySide::sensor) ? pair.sensor_group(i) : pair.actuator_group(i);
    out.betas[i] = static_cast<double>(beta_plain(group));
  }
  return out;
}

inline KeyCoefficients quantized_coefficients(const QuantumKeyPair& pair, KeySide side,
                                              double alpha, std::span<const double> xbar) {
  if (static_cast<int>(xbar.size()) != pair.n)
    throw std::invalid_argument("quantized_coefficients: xbar size mismatch");
  KeyCoefficients out;
  out.t = pair.t;
  out.variant = KeyVariant::quantized;
  out.betas.resize(pair.n);
  for (int i = 0; i < pair.n; ++i) {
    const auto group = (side == KeySide::sensor) ? pair.sensor_group(i) : pair.actuator_group(i);
    out.betas[i] = beta_quantized(group, alpha, xbar[i]);
  }
  return out;
}

}  // namespace qec

#endif  // QEC_KEYMAT_HPP
