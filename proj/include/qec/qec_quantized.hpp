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

#ifndef QEC_QEC_QUANTIZED_HPP
#define QEC_QEC_QUANTIZED_HPP

// The pipeline over w-bit channels.  Offset keys keep every exponent inside
// the quantizer's multiplicative window [1/(1+alpha), 1+alpha]; the
// controller re-normalizes with per-dimension exponents delta_i >= |K_i| so
// its own quantizer input stays representable; decryption undoes the
// normalization inside the logarithm.  The mean-square error of u against
// K x is bounded by sum_i 5 (beta_i delta_i)^2 / 2^(2w) up to higher order.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/keymat.hpp"
#include "qec/qec_core.hpp"
#include "qec/quantizer.hpp"

namespace qec {

struct QuantizedScenario {
  int w = 0;
  int w_b = 0;
  double alpha = 0.0;
  std::vector<double> xbar;
  std::vector<double> delta;
  GainRow gains;

  int dims() const { return static_cast<int>(gains.size()); }

  // delta_i = max(|K_i|, 1) * (1 + 2^-(w-1)); the strict margin keeps the
  // controller's quantizer input below the top grid point even when |K_i|
  // attains the bound.
  static std::vector<double> default_deltas(const GainRow& gains, int w) {
    std::vector<double> out(gains.size());
    const double margin = 1.0 + std::ldexp(1.0, -(w - 1));
    for (std::size_t i = 0; i < gains.size(); ++i)
      out[i] = std::max(std::abs(gains[i]), 1.0) * margin;
    return out;
  }

  void validate() const {
    if (w < 2 || w > 32) throw std::invalid_argument("scenario: violates 2 <= w <= 32");
    if (w_b < 1 || w_b > 24) throw std::invalid_argument("scenario: violates 1 <= w_b <= 24");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("scenario: violates alpha in (0, 1]");
    if (!(1.0 + alpha <= top_of_grid(w)))
      throw std::invalid_argument("scenario: violates (1+alpha) <= 2 - 2^-(w-1) (w=" +
                                  std::to_string(w) + ", alpha=" + std::to_string(alpha) + ")");
    const int n = dims();
    if (n < 1) throw std::invalid_argument("scenario: empty gain row");
    if (static_cast<int>(xbar.size()) != n || static_cast<int>(delta.size()) != n)
      throw std::invalid_argument("scenario: xbar/delta dimension mismatch");
    for (int i = 0; i < n; ++i) {
      if (!(xbar[i] > 0.0))
        throw std::invalid_argument("scenario: violates xbar_" + std::to_string(i) + " > 0");
      if (!(delta[i] >= std::abs(gains[i])))
        throw std::invalid_argument("scenario: violates delta_" + std::to_string(i) +
                                    " >= |K_" + std::to_string(i) + "|");
    }
  }
};

enum class FrameKind : std::uint8_t { state = 0, input = 1 };

struct QuantCipherFrame {
  std::uint64_t t = 0;
  FrameKind kind = FrameKind::state;
  std::vector<WWord> words;

  int dims() const { return static_cast<int>(words.size()); }

  bool operator==(const QuantCipherFrame&) const = default;
};

inline QuantCipherFrame encrypt_q(const StateVector& x, const KeyCoefficients& keys,
                                  const QuantizedScenario& scen, Rng& rng) {
  if (keys.variant != KeyVariant::quantized)
    throw std::invalid_argument("encrypt_q: quantized key variant required");
  const int n = scen.dims();
  if (static_cast<int>(x.size()) != n || keys.dims() != n)
    throw std::invalid_argument("encrypt_q: dimension mismatch");
  QuantCipherFrame frame;
  frame.t = keys.t;
  frame.kind = FrameKind::state;
  frame.words.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (!(std::abs(x[i]) < scen.xbar[i]))
      throw std::range_error("encrypt_q: state bound violated at dimension " + std::to_string(i) +
                             " (|x| = " + std::to_string(std::abs(x[i])) +
                             ", xbar = " + std::to_string(scen.xbar[i]) + ")");
    const double v = std::exp(x[i] / keys.betas[i]);
    frame.words.push_back(quantize(v, scen.w, rng));
  }
  return frame;
}

inline QuantCipherFrame control_q(const GainRow& gains, const QuantCipherFrame& frame,
                                  const QuantizedScenario& scen, Rng& rng) {
  if (frame.kind != FrameKind::state)
    throw std::invalid_argument("control_q: state frame required");
  const int n = scen.dims();
  if (static_cast<int>(gains.size()) != n || frame.dims() != n)
    throw std::invalid_argument("control_q: dimension mismatch");
  QuantCipherFrame out;
  out.t = frame.t;
  out.kind = FrameKind::input;
  out.words.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (!(scen.delta[i] >= std::abs(gains[i])))
      throw std::invalid_argument("control_q: violates delta_" + std::to_string(i) +
                                  " >= |K_" + std::to_string(i) + "|");
    const double base = g_warp_inverse(frame.words[i].val());
    // (g^-1(val)^K)^(1/delta) computed as a single power.
    const double normalized = std::pow(base, gains[i] / scen.delta[i]);
    try {
      out.words.push_back(quantize(normalized, scen.w, rng));
    } catch (const std::range_error& e) {
      throw std::range_error("control_q: configuration pushed quantizer input out of range "
                             "(dimension " + std::to_string(i) + "): " + e.what());
    }
  }
  return out;
}

inline double decrypt_q(const QuantCipherFrame& frame, const KeyCoefficients& keys,
                        const QuantizedScenario& scen) {
  if (frame.kind != FrameKind::input)
    throw std::invalid_argument("decrypt_q: input frame required");
  const int n = scen.dims();
  if (frame.dims() != n || keys.dims() != n)
    throw std::invalid_argument("decrypt_q: dimension mismatch");
  double u = 0.0;
  for (int i = 0; i < n; ++i)
    u += scen.delta[i] * keys.betas[i] * std::log(g_warp_inverse(frame.words[i].val()));
  return u;
}

// Leading-order mean-square error bound for the given keys.
inline double mse_bound(const KeyCoefficients& keys, const QuantizedScenario& scen) {
  const int n = scen.dims();
  if (keys.dims() != n) throw std::invalid_argument("mse_bound: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double bd = keys.betas[i] * scen.delta[i];
    sum += 5.0 * bd * bd;
  }
  return std::ldexp(sum, -2 * scen.w);
}

// Same bound averaged over the key distribution (exact enumeration of
// E[beta^2] per dimension).
inline double mse_bound_expected(const QuantizedScenario& scen) {
  double sum = 0.0;
  for (int i = 0; i < scen.dims(); ++i) {
    const double e_beta_sq = beta_quantized_mean_square(scen.w_b, scen.alpha, scen.xbar[i]);
    sum += 5.0 * e_beta_sq * scen.delta[i] * scen.delta[i];
  }
  return std::ldexp(sum, -2 * scen.w);
}

}  // namespace qec

#endif  // QEC_QEC_QUANTIZED_HPP
