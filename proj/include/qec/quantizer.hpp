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

#ifndef QEC_QUANTIZER_HPP
#define QEC_QUANTIZER_HPP

// Stochastic w-bit quantization of values near one.  A warp g maps the
// multiplicative interval [1/2, 2] onto [0, 2]; the dithered rounder h_w then
// picks one of the two neighboring grid points k / 2^(w-1) with
// probabilities that make the rounding unbiased.  Because scaling by 2^(w-1)
// is exact in binary floating point, the two-atom law of every input is
// available exactly, which the privacy accounting exploits.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/rng.hpp"

namespace qec {

// Warp toward the quantizer domain: identity above 1, reciprocal fold below.
inline double g_warp(double v) {
  if (!(v > 0.0)) throw std::invalid_argument("g_warp: input must be positive");
  return v > 1.0 ? v : 2.0 - 1.0 / v;
}

inline double g_warp_inverse(double y) {
  if (!(y >= 0.0)) throw std::invalid_argument("g_warp_inverse: input must be nonnegative");
  return y > 1.0 ? y : 1.0 / (2.0 - y);
}

// A w-bit word a_(w-1)...a_0 decoding to val = sum_j 2^-j a_j.  The integer
// code is val * 2^(w-1); a_0 is the code's most significant bit and a_(w-1),
// the first bit on the wire, is its least significant bit.
struct WWord {
  int w = 0;
  std::uint32_t code = 0;

  WWord() = default;
  WWord(int width, std::uint32_t c) : w(width), code(c) {
    if (width < 2 || width > 32) throw std::invalid_argument("WWord: width outside [2, 32]");
    if (width < 32 && c >> width)
      throw std::invalid_argument("WWord: code does not fit the width");
  }

  double val() const { return std::ldexp(static_cast<double>(code), -(w - 1)); }

  int bit(int j) const { return static_cast<int>((code >> (w - 1 - j)) & 1u); }

  bool operator==(const WWord&) const = default;
};

// Largest representable decoded value, 2 - 2^-(w-1).
inline double top_of_grid(int w) { return 2.0 - std::ldexp(1.0, -(w - 1)); }

namespace detail {

struct GridSplit {
  std::uint32_t floor_code;
  double frac;  // exact: ldexp and the nearby-integer subtraction round-trip
};

inline GridSplit split_on_grid(double y, int w, const char* who) {
  if (w < 2 || w > 32) throw std::invalid_argument(std::string(who) + ": width outside [2, 32]");
  if (!(y >= 0.0 && y <= top_of_grid(w)))
    throw std::range_error(std::string(who) + ": input " + std::to_string(y) +
                           " outside admissible range [0, " + std::to_string(top_of_grid(w)) +
                           "]");
  const double scaled = std::ldexp(y, w - 1);
  const double floor_part = std::floor(scaled);
  return GridSplit{static_cast<std::uint32_t>(floor_part), scaled - floor_part};
}

}  // namespace detail

// Dithered rounding to the grid {k 2^-(w-1)}: the floor point with
// probability 1 - frac, the next point with probability frac.  Grid points
// round deterministically.
inline WWord stochastic_round(double y, int w, Rng& rng) {
  const auto split = detail::split_on_grid(y, w, "stochastic_round");
  std::uint32_t code = split.floor_code;
  if (split.frac > 0.0 && rng.uniform01() < split.frac) ++code;
  return WWord(w, code);
}

inline WWord quantize(double v, int w, Rng& rng) {
  if (!(v >= 0.5)) throw std::range_error("quantize: input below 1/2");
  return stochastic_round(g_warp(v), w, rng);
}

struct Atom {
  WWord word;
  double probability;
};

// Exact output law of quantize(v, w): at most two atoms whose probabilities
// sum to one and whose mean equals g(v) exactly.
inline std::vector<Atom> atom_distribution(double v, int w) {
  if (!(v >= 0.5)) throw std::range_error("atom_distribution: input below 1/2");
  const auto split = detail::split_on_grid(g_warp(v), w, "atom_distribution");
  if (split.frac == 0.0) return {Atom{WWord(w, split.floor_code), 1.0}};
  return {Atom{WWord(w, split.floor_code), 1.0 - split.frac},
          Atom{WWord(w, split.floor_code + 1), split.frac}};
}

inline double atom_mean(std::span<const Atom> atoms) {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.probability * a.word.val();
  return m;
}

inline double atom_variance(std::span<const Atom> atoms) {
  const double m = atom_mean(atoms);
  double v = 0.0;
  for (const Atom& a : atoms) {
    const double d = a.word.val() - m;
    v += a.probability * d * d;
  }
  return v;
}

// Total-variation distance between two atom lists over the same width.
inline double total_variation(std::span<const Atom> lhs, std::span<const Atom> rhs) {
  std::map<std::uint32_t, double> diff;
  for (const Atom& a : lhs) diff[a.word.code] += a.probability;
  for (const Atom& a : rhs) diff[a.word.code] -= a.probability;
  double tv = 0.0;
  for (const auto& [code, d] : diff)
    if (d > 0.0) tv += d;
  return tv;
}

// Wire packing: per word the bits a_(w-1)..a_0 in that order, words
// concatenated, zero-padded to a byte boundary.
inline std::vector<std::uint8_t> pack_words(std::span<const WWord> words) {
  std::vector<std::uint8_t> out;
  int bitpos = 0;
  for (const WWord& word : words) {
    for (int j = word.w - 1; j >= 0; --j) {
      if (bitpos % 8 == 0) out.push_back(0);
      if (word.bit(j)) out.back() |= static_cast<std::uint8_t>(0x80u >> (bitpos % 8));
      ++bitpos;
    }
  }
  return out;
}

inline std::vector<WWord> unpack_words(std::span<const std::uint8_t> bytes, int count, int w) {
  if (w < 2 || w > 32) throw std::invalid_argument("unpack_words: width outside [2, 32]");
  const std::size_t need = (static_cast<std::size_t>(count) * w + 7) / 8;
  if (bytes.size() != need)
    throw std::runtime_error("unpack_words: expected " + std::to_string(need) + " bytes, got " +
                             std::to_string(bytes.size()));
  std::vector<WWord> out;
  out.reserve(count);
  std::size_t bitpos = 0;
  for (int i = 0; i < count; ++i) {
    std::uint32_t code = 0;
    for (int j = w - 1; j >= 0; --j) {
      const std::uint8_t byte = bytes[bitpos / 8];
      const int bit = (byte >> (7 - bitpos % 8)) & 1;
      code |= static_cast<std::uint32_t>(bit) << (w - 1 - j);
      ++bitpos;
    }
    out.emplace_back(w, code);
  }
  // Padding bits must be zero.
  for (; bitpos < bytes.size() * 8; ++bitpos)
    if ((bytes[bitpos / 8] >> (7 - bitpos % 8)) & 1)
      throw std::runtime_error("unpack_words: nonzero padding bit");
  return out;
}

}  // namespace qec

#endif  // QEC_QUANTIZER_HPP
