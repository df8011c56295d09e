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

#ifndef QEC_BIGNUM_HPP
#define QEC_BIGNUM_HPP

// Textbook multiprecision arithmetic for the benchmark baselines: schoolbook
// multiplication, shift-subtract division, Montgomery modular
// exponentiation, binary gcd, extended-Euclid inverse and Miller-Rabin.
// Deliberately small key sizes; nothing here is hardened.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qec/rng.hpp"

namespace qec {

class BigUint {
 public:
  BigUint() = default;
  BigUint(std::uint64_t v) {  // NOLINT: implicit by design, mirrors integer use
    if (v) limbs_.push_back(v);
  }

  static BigUint random_bits(int bits, Rng& rng) {
    if (bits <= 0) throw std::invalid_argument("random_bits: need bits > 0");
    BigUint out;
    out.limbs_.resize((bits + 63) / 64);
    for (auto& l : out.limbs_) l = rng.next_u64();
    const int top = bits % 64;
    if (top) out.limbs_.back() &= (~std::uint64_t{0}) >> (64 - top);
    out.limbs_.back() |= std::uint64_t{1} << ((bits - 1) % 64);  // force the width
    out.trim();
    return out;
  }

  bool is_zero() const { return limbs_.empty(); }
  bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1); }

  int bit_length() const {
    if (limbs_.empty()) return 0;
    int bits = static_cast<int>(limbs_.size() - 1) * 64;
    std::uint64_t top = limbs_.back();
    while (top) {
      ++bits;
      top >>= 1;
    }
    return bits;
  }

  bool bit(int i) const {
    const std::size_t limb = static_cast<std::size_t>(i) / 64;
    if (limb >= limbs_.size()) return false;
    return (limbs_[limb] >> (i % 64)) & 1;
  }

  std::uint64_t low_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

  std::strong_ordering operator<=>(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size())
      return limbs_.size() <=> o.limbs_.size();
    for (std::size_t i = limbs_.size(); i-- > 0;)
      if (limbs_[i] != o.limbs_[i]) return limbs_[i] <=> o.limbs_[i];
    return std::strong_ordering::equal;
  }
  bool operator==(const BigUint& o) const { return (*this <=> o) == 0; }

  BigUint operator+(const BigUint& o) const {
    BigUint out;
    const std::size_t n = std::max(limbs_.size(), o.limbs_.size());
    out.limbs_.resize(n);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      carry += (i < limbs_.size() ? limbs_[i] : 0);
      carry += (i < o.limbs_.size() ? o.limbs_[i] : 0);
      out.limbs_[i] = static_cast<std::uint64_t>(carry);
      carry >>= 64;
    }
    if (carry) out.limbs_.push_back(static_cast<std::uint64_t>(carry));
    return out;
  }

  // Requires *this >= o.
  BigUint operator-(const BigUint& o) const {
    if (*this < o) throw std::underflow_error("BigUint: negative difference");
    BigUint out;
    out.limbs_.resize(limbs_.size());
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      const std::uint64_t rhs = (i < o.limbs_.size() ? o.limbs_[i] : 0);
      const unsigned __int128 lhs = static_cast<unsigned __int128>(limbs_[i]);
      unsigned __int128 sub = static_cast<unsigned __int128>(rhs) +
                              static_cast<unsigned __int128>(borrow < 0 ? 1 : 0);
      if (lhs >= sub) {
        out.limbs_[i] = static_cast<std::uint64_t>(lhs - sub);
        borrow = 0;
      } else {
        out.limbs_[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64) +
                                                   lhs - sub);
        borrow = -1;
      }
    }
    out.trim();
    return out;
  }

  BigUint operator*(const BigUint& o) const {
    if (is_zero() || o.is_zero()) return BigUint();
    BigUint out;
    out.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      unsigned __int128 carry = 0;
      for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
        carry += static_cast<unsigned __int128>(limbs_[i]) * o.limbs_[j] + out.limbs_[i + j];
        out.limbs_[i + j] = static_cast<std::uint64_t>(carry);
        carry >>= 64;
      }
      out.limbs_[i + o.limbs_.size()] = static_cast<std::uint64_t>(carry);
    }
    out.trim();
    return out;
  }

  BigUint shifted_left(int bits) const {
    if (is_zero() || bits == 0) return *this;
    BigUint out;
    const int limb_shift = bits / 64;
    const int bit_shift = bits % 64;
    out.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      out.limbs_[i + limb_shift] |= limbs_[i] << bit_shift;
      if (bit_shift)
        out.limbs_[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
    }
    out.trim();
    return out;
  }

  BigUint shifted_right(int bits) const {
    const int limb_shift = bits / 64;
    const int bit_shift = bits % 64;
    if (static_cast<std::size_t>(limb_shift) >= limbs_.size()) return BigUint();
    BigUint out;
    out.limbs_.assign(limbs_.size() - limb_shift, 0);
    for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
      out.limbs_[i] = limbs_[i + limb_shift] >> bit_shift;
      if (bit_shift && i + limb_shift + 1 < limbs_.size())
        out.limbs_[i] |= limbs_[i + limb_shift + 1] << (64 - bit_shift);
    }
    out.trim();
    return out;
  }

  struct DivMod;

  // Shift-subtract long division; fine for keygen-time use.
  DivMod divmod(const BigUint& divisor) const;

  BigUint mod(const BigUint& m) const;

 private:
  friend class Montgomery;
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  }
  std::vector<std::uint64_t> limbs_;  // little-endian
};

struct BigUint::DivMod {
  BigUint quotient;
  BigUint remainder;
};

inline BigUint::DivMod BigUint::divmod(const BigUint& divisor) const {
  if (divisor.is_zero()) throw std::invalid_argument("BigUint: division by zero");
  DivMod out;
  if (*this < divisor) {
    out.remainder = *this;
    return out;
  }
  const int shift = bit_length() - divisor.bit_length();
  BigUint cursor = divisor.shifted_left(shift);
  BigUint rem = *this;
  BigUint quot;
  quot.limbs_.assign(static_cast<std::size_t>(shift) / 64 + 1, 0);
  for (int s = shift; s >= 0; --s) {
    if (!(rem < cursor)) {
      rem = rem - cursor;
      quot.limbs_[static_cast<std::size_t>(s) / 64] |= std::uint64_t{1} << (s % 64);
    }
    cursor = cursor.shifted_right(1);
  }
  quot.trim();
  out.quotient = std::move(quot);
  out.remainder = std::move(rem);
  return out;
}

inline BigUint BigUint::mod(const BigUint& m) const { return divmod(m).remainder; }

// Montgomery context for an odd modulus; the hot path of every modexp.
class Montgomery {
 public:
  explicit Montgomery(const BigUint& modulus) : n_(modulus) {
    if (!modulus.is_odd()) throw std::invalid_argument("Montgomery: modulus must be odd");
    k_ = n_.limbs_.size();
    // -n^-1 mod 2^64 by Newton iteration.
    const std::uint64_t n0 = n_.limbs_[0];
    std::uint64_t inv = n0;  // correct to 3 bits, doubles each step
    for (int i = 0; i < 6; ++i) inv *= 2 - n0 * inv;
    ninv_ = ~inv + 1;  // negate
    // R^2 mod n by repeated doubling: R = 2^(64k).
    BigUint r2 = BigUint(1).shifted_left(static_cast<int>(64 * k_)).mod(n_);
    for (std::size_t i = 0; i < 64 * k_; ++i) {
      r2 = r2 + r2;
      if (!(r2 < n_)) r2 = r2 - n_;
    }
    r2_ = to_limbs(r2);
    one_ = to_limbs(BigUint(1).shifted_left(static_cast<int>(64 * k_)).mod(n_));
  }

  BigUint pow_mod(const BigUint& base, const BigUint& exponent) const {
    const std::vector<std::uint64_t> base_m = mont_mul(to_limbs(base.mod(n_)), r2_);
    std::vector<std::uint64_t> acc = one_;
    for (int i = exponent.bit_length() - 1; i >= 0; --i) {
      acc = mont_mul(acc, acc);
      if (exponent.bit(i)) acc = mont_mul(acc, base_m);
    }
    acc = mont_mul(acc, to_limbs(BigUint(1)));
    return from_limbs(acc);
  }

  BigUint mul_mod(const BigUint& a, const BigUint& b) const {
    const auto am = mont_mul(to_limbs(a.mod(n_)), r2_);
    const auto bm = mont_mul(to_limbs(b.mod(n_)), r2_);
    return from_limbs(mont_mul(mont_mul(am, bm), to_limbs(BigUint(1))));
  }

  const BigUint& modulus() const { return n_; }

 private:
  std::vector<std::uint64_t> to_limbs(const BigUint& v) const {
    std::vector<std::uint64_t> out = v.limbs_;
    out.resize(k_, 0);
    return out;
  }

  BigUint from_limbs(std::vector<std::uint64_t> limbs) const {
    BigUint out;
    out.limbs_ = std::move(limbs);
    out.trim();
    return out;
  }

  // CIOS Montgomery multiplication on fixed-width limb vectors.
  std::vector<std::uint64_t> mont_mul(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b) const {
    std::vector<std::uint64_t> t(k_ + 2, 0);
    for (std::size_t i = 0; i < k_; ++i) {
      unsigned __int128 carry = 0;
      for (std::size_t j = 0; j < k_; ++j) {
        carry += static_cast<unsigned __int128>(a[i]) * b[j] + t[j];
        t[j] = static_cast<std::uint64_t>(carry);
        carry >>= 64;
      }
      carry += t[k_];
      t[k_] = static_cast<std::uint64_t>(carry);
      t[k_ + 1] = static_cast<std::uint64_t>(carry >> 64);

      const std::uint64_t m = t[0] * ninv_;
      carry = static_cast<unsigned __int128>(m) * n_.limbs_[0] + t[0];
      carry >>= 64;
      for (std::size_t j = 1; j < k_; ++j) {
        carry += static_cast<unsigned __int128>(m) * n_.limbs_[j] + t[j];
        t[j - 1] = static_cast<std::uint64_t>(carry);
        carry >>= 64;
      }
      carry += t[k_];
      t[k_ - 1] = static_cast<std::uint64_t>(carry);
      t[k_] = t[k_ + 1] + static_cast<std::uint64_t>(carry >> 64);
      t[k_ + 1] = 0;
    }
    std::vector<std::uint64_t> out(t.begin(), t.begin() + static_cast<long>(k_));
    bool ge = t[k_] != 0;
    if (!ge) {
      ge = true;
      for (std::size_t i = k_; i-- > 0;) {
        if (out[i] != n_.limbs_[i]) {
          ge = out[i] > n_.limbs_[i];
          break;
        }
      }
    }
    if (ge) {
      unsigned __int128 borrow = 0;
      for (std::size_t i = 0; i < k_; ++i) {
        const unsigned __int128 lhs = out[i];
        const unsigned __int128 rhs = static_cast<unsigned __int128>(n_.limbs_[i]) + borrow;
        if (lhs >= rhs) {
          out[i] = static_cast<std::uint64_t>(lhs - rhs);
          borrow = 0;
        } else {
          out[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64) + lhs -
                                              rhs);
          borrow = 1;
        }
      }
    }
    return out;
  }

  BigUint n_;
  std::size_t k_ = 0;
  std::uint64_t ninv_ = 0;
  std::vector<std::uint64_t> r2_;
  std::vector<std::uint64_t> one_;
};

inline BigUint pow_mod(const BigUint& base, const BigUint& exponent, const BigUint& modulus) {
  if (modulus.is_odd()) return Montgomery(modulus).pow_mod(base, exponent);
  // Plain square-and-multiply with division; only hit by degenerate inputs.
  BigUint acc(1);
  BigUint b = base.mod(modulus);
  for (int i = exponent.bit_length() - 1; i >= 0; --i) {
    acc = (acc * acc).mod(modulus);
    if (exponent.bit(i)) acc = (acc * b).mod(modulus);
  }
  return acc;
}

inline BigUint gcd(BigUint a, BigUint b) {
  while (!b.is_zero()) {
    BigUint r = a.mod(b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Inverse of a modulo m (throws when gcd != 1).  Iterative extended Euclid
// maintaining s_k * a = r_k (mod m) with sign bookkeeping.
inline BigUint mod_inverse(const BigUint& a, const BigUint& m) {
  BigUint r0 = m, r1 = a.mod(m);
  BigUint s0(0), s1(1);
  bool neg0 = false, neg1 = false;
  while (!r1.is_zero()) {
    const auto qr = r0.divmod(r1);
    BigUint qs = qr.quotient * s1;
    BigUint s2;
    bool neg2;
    if (neg0 == neg1) {
      if (!(s0 < qs)) {
        s2 = s0 - qs;
        neg2 = neg0;
      } else {
        s2 = qs - s0;
        neg2 = !neg0;
      }
    } else {
      s2 = s0 + qs;
      neg2 = neg0;
    }
    r0 = std::move(r1);
    r1 = qr.remainder;
    s0 = std::move(s1);
    neg0 = neg1;
    s1 = std::move(s2);
    neg1 = neg2;
  }
  if (!(r0 == BigUint(1))) throw std::domain_error("mod_inverse: not invertible");
  BigUint res = s0.mod(m);
  if (neg0 && !res.is_zero()) res = m - res;
  return res;
}

inline bool miller_rabin(const BigUint& n, int rounds, Rng& rng) {
  if (n < BigUint(4)) return n == BigUint(2) || n == BigUint(3);
  if (!n.is_odd()) return false;
  const BigUint n1 = n - BigUint(1);
  BigUint d = n1;
  int s = 0;
  while (!d.is_odd()) {
    d = d.shifted_right(1);
    ++s;
  }
  const Montgomery mont(n);
  for (int round = 0; round < rounds; ++round) {
    const BigUint a = BigUint(2) + BigUint(rng.next_u64() % 0xFFFFFFFF);
    BigUint x = mont.pow_mod(a, d);
    if (x == BigUint(1) || x == n1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mont.mul_mod(x, x);
      if (x == n1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

inline BigUint random_prime(int bits, Rng& rng) {
  static constexpr std::uint64_t kSmallPrimes[] = {3,  5,  7,  11, 13, 17, 19, 23,
                                                   29, 31, 37, 41, 43, 47, 53, 59};
  for (int attempt = 0; attempt < 100000; ++attempt) {
    BigUint cand = BigUint::random_bits(bits, rng);
    if (!cand.is_odd()) cand = cand + BigUint(1);
    bool small_factor = false;
    for (std::uint64_t p : kSmallPrimes)
      if (cand.mod(BigUint(p)).is_zero()) {
        small_factor = true;
        break;
      }
    if (small_factor) continue;
    if (miller_rabin(cand, 20, rng)) return cand;
  }
  throw std::runtime_error("random_prime: generation failed");
}

}  // namespace qec

#endif  // QEC_BIGNUM_HPP
