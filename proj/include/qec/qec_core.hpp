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

#ifndef QEC_QEC_CORE_HPP
#define QEC_QEC_CORE_HPP

// The exact exponential-logarithmic pipeline: the sensor encrypts each state
// entry as exp(x_i / beta_i), the controller raises ciphertext entries to
// the gain powers without ever seeing plaintext, and the actuator recovers
// the scalar input as a beta-weighted sum of logarithms.  With matched keys
// the composition returns exactly K x.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/keymat.hpp"

namespace qec {

using StateVector = std::vector<double>;
using GainRow = std::vector<double>;

struct RealCiphertext {
  std::uint64_t t = 0;
  std::vector<double> values;  // strictly positive

  int dims() const { return static_cast<int>(values.size()); }
};

// Largest exponent magnitude fed to exp(); beyond this the ciphertext would
// leave double range, which signals a state-bound/key mismatch upstream.
inline constexpr double kMaxExponent = 700.0;

inline RealCiphertext encrypt(const StateVector& x, const KeyCoefficients& keys) {
  if (keys.variant != KeyVariant::plain)
    throw std::invalid_argument("encrypt: plain key variant required");
  if (static_cast<int>(x.size()) != keys.dims())
    throw std::invalid_argument("encrypt: dimension mismatch");
  RealCiphertext ct;
  ct.t = keys.t;
  ct.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw std::invalid_argument("encrypt: non-finite state entry");
    const double exponent = x[i] / keys.betas[i];
    if (std::abs(exponent) > kMaxExponent)
      throw std::range_error("encrypt: exponent guard exceeded at dimension " +
                             std::to_string(i) + " (|x/beta| = " +
                             std::to_string(std::abs(exponent)) + ")");
    ct.values[i] = std::exp(exponent);
  }
  return ct;
}

inline RealCiphertext control(const GainRow& gains, const RealCiphertext& ct) {
  if (static_cast<int>(gains.size()) != ct.dims())
    throw std::invalid_argument("control: dimension mismatch");
  RealCiphertext out;
  out.t = ct.t;
  out.values.resize(ct.values.size());
  for (std::size_t i = 0; i < ct.values.size(); ++i) {
    if (!(ct.values[i] > 0.0))
      throw std::invalid_argument("control: nonpositive ciphertext entry");
    const double powered = std::pow(ct.values[i], gains[i]);
    if (!(powered > 0.0) || !std::isfinite(powered))
      throw std::range_error("control: gain power left double range at dimension " +
                             std::to_string(i));
    out.values[i] = powered;
  }
  return out;
}

inline double decrypt(const RealCiphertext& ct, const KeyCoefficients& keys) {
  if (static_cast<int>(ct.values.size()) != keys.dims())
    throw std::invalid_argument("decrypt: dimension mismatch");
  double u = 0.0;
  for (std::size_t i = 0; i < ct.values.size(); ++i) {
    if (!(ct.values[i] > 0.0))
      throw std::invalid_argument("decrypt: nonpositive ciphertext entry");
    u += keys.betas[i] * std::log(ct.values[i]);
  }
  return u;
}

// IEEE-754 binary64 big-endian payload encoding, one entry after another in
// dimension order.
inline void append_binary64_be(std::vector<std::uint8_t>& out, double value) {
  std::uint64_t raw = std::bit_cast<std::uint64_t>(value);
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>((raw >> shift) & 0xFF));
}

inline double read_binary64_be(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw std::runtime_error("read_binary64_be: short buffer");
  std::uint64_t raw = 0;
  for (int k = 0; k < 8; ++k) raw = (raw << 8) | bytes[static_cast<std::size_t>(k)];
  return std::bit_cast<double>(raw);
}

inline std::vector<std::uint8_t> encode_values_be(std::span<const double> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 8);
  for (double v : values) append_binary64_be(out, v);
  return out;
}

inline std::vector<double> decode_values_be(std::span<const std::uint8_t> bytes, int count) {
  if (bytes.size() != static_cast<std::size_t>(count) * 8)
    throw std::runtime_error("decode_values_be: payload size mismatch");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = read_binary64_be(bytes.subspan(i * 8, 8));
  return out;
}

}  // namespace qec

#endif  // QEC_QEC_CORE_HPP
