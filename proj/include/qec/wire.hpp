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

#ifndef QEC_WIRE_HPP
#define QEC_WIRE_HPP

// Frame wire format shared by both realizations.
//
//   magic   u16 BE = 0x5143 ("QC")
//   version u8     = 1
//   kind    u8     : 0 = quantized state, 1 = quantized input,
//                    2 = real state,      3 = real input
//   t       u64 BE
//   n       u16 BE
//   w       u8     : word width for quantized payloads, 0 for binary64
//
// followed by either ceil(n*w/8) bytes of packed words (bits a_(w-1)..a_0
// per word, zero-padded) or n big-endian binary64 values.  Parse failures
// report the byte offset of the offending field.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/qec_core.hpp"
#include "qec/qec_quantized.hpp"
#include "qec/quantizer.hpp"

namespace qec {

inline constexpr std::uint16_t kFrameMagic = 0x5143;
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 15;

struct RealFrame {
  std::uint64_t t = 0;
  FrameKind kind = FrameKind::state;
  std::vector<double> values;

  bool operator==(const RealFrame&) const = default;
};

class FrameParseError : public std::runtime_error {
 public:
  FrameParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

inline void append_header(std::vector<std::uint8_t>& out, std::uint8_t kind, std::uint64_t t,
                          std::uint16_t n, std::uint8_t w) {
  out.push_back(static_cast<std::uint8_t>(kFrameMagic >> 8));
  out.push_back(static_cast<std::uint8_t>(kFrameMagic & 0xFF));
  out.push_back(kFrameVersion);
  out.push_back(kind);
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>((t >> shift) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(n >> 8));
  out.push_back(static_cast<std::uint8_t>(n & 0xFF));
  out.push_back(w);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_frame(const QuantCipherFrame& frame) {
  if (frame.words.empty()) throw std::invalid_argument("encode_frame: empty frame");
  if (frame.words.size() > 0xFFFF) throw std::invalid_argument("encode_frame: too many words");
  const int w = frame.words.front().w;
  for (const WWord& word : frame.words)
    if (word.w != w) throw std::invalid_argument("encode_frame: mixed word widths");
  std::vector<std::uint8_t> out;
  detail::append_header(out, static_cast<std::uint8_t>(frame.kind), frame.t,
                        static_cast<std::uint16_t>(frame.words.size()),
                        static_cast<std::uint8_t>(w));
  const auto payload = pack_words(frame.words);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

inline std::vector<std::uint8_t> encode_frame(const RealFrame& frame) {
  if (frame.values.empty()) throw std::invalid_argument("encode_frame: empty frame");
  if (frame.values.size() > 0xFFFF)
    throw std::invalid_argument("encode_frame: too many values");
  std::vector<std::uint8_t> out;
  detail::append_header(out, static_cast<std::uint8_t>(2 + static_cast<int>(frame.kind)),
                        frame.t, static_cast<std::uint16_t>(frame.values.size()), 0);
  const auto payload = encode_values_be(frame.values);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

struct DecodedFrame {
  bool quantized = false;
  QuantCipherFrame quant;
  RealFrame real;
};

inline DecodedFrame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize)
    throw FrameParseError("decode_frame: truncated header", bytes.size());
  const std::uint16_t magic = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  if (magic != kFrameMagic) throw FrameParseError("decode_frame: bad magic", 0);
  if (bytes[2] != kFrameVersion) throw FrameParseError("decode_frame: bad version", 2);
  const std::uint8_t kind = bytes[3];
  if (kind > 3) throw FrameParseError("decode_frame: bad kind", 3);
  std::uint64_t t = 0;
  for (int k = 0; k < 8; ++k) t = (t << 8) | bytes[4 + k];
  const std::uint16_t n = static_cast<std::uint16_t>((bytes[12] << 8) | bytes[13]);
  const std::uint8_t w = bytes[14];
  if (n == 0) throw FrameParseError("decode_frame: empty payload", 12);

  const std::span<const std::uint8_t> payload = bytes.subspan(kFrameHeaderSize);
  DecodedFrame out;
  if (kind <= 1) {
    if (w < 2 || w > 32) throw FrameParseError("decode_frame: bad word width", 14);
    const std::size_t need = (static_cast<std::size_t>(n) * w + 7) / 8;
    if (payload.size() != need)
      throw FrameParseError("decode_frame: payload size mismatch (want " +
                                std::to_string(need) + ", got " +
                                std::to_string(payload.size()) + ")",
                            kFrameHeaderSize + std::min(payload.size(), need));
    out.quantized = true;
    out.quant.t = t;
    out.quant.kind = static_cast<FrameKind>(kind);
    try {
      out.quant.words = unpack_words(payload, n, w);
    } catch (const std::runtime_error& e) {
      throw FrameParseError(std::string("decode_frame: ") + e.what(), kFrameHeaderSize);
    }
  } else {
    if (w != 0) throw FrameParseError("decode_frame: width must be 0 for binary64", 14);
    if (payload.size() != static_cast<std::size_t>(n) * 8)
      throw FrameParseError("decode_frame: payload size mismatch (want " +
                                std::to_string(n * 8) + ", got " +
                                std::to_string(payload.size()) + ")",
                            kFrameHeaderSize + std::min<std::size_t>(payload.size(), n * 8));
    out.quantized = false;
    out.real.t = t;
    out.real.kind = static_cast<FrameKind>(kind - 2);
    out.real.values = decode_values_be(payload, n);
  }
  return out;
}

}  // namespace qec

#endif  // QEC_WIRE_HPP
