#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "qec/qec_core.hpp"
#include "qec/rng.hpp"

namespace {

qec::KeyCoefficients plain_keys(std::vector<double> betas) {
  qec::KeyCoefficients k;
  k.variant = qec::KeyVariant::plain;
  k.betas = std::move(betas);
  return k;
}

// Independent oracle for the full pipeline: plain scalar product.
double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("encrypt basics") {
  REQUIRE(qec::encrypt({0.0, 0.0}, plain_keys({3, -2})).values ==
          std::vector<double>{1.0, 1.0});
  REQUIRE(qec::encrypt({1.0}, plain_keys({1})).values[0] ==
          Approx(std::exp(1.0)).epsilon(1e-15));
  REQUIRE(qec::encrypt({2.0}, plain_keys({-2})).values[0] ==
          Approx(std::exp(-1.0)).epsilon(1e-15));
  REQUIRE_THROWS_AS(qec::encrypt({8000.0}, plain_keys({1})), std::range_error);
}

TEST_CASE("control basics") {
  qec::RealCiphertext ones;
  ones.values = {1.0, 1.0, 1.0};
  const auto out = qec::control({5.0, -3.0, 0.25}, ones);
  REQUIRE(out.values == std::vector<double>{1.0, 1.0, 1.0});

  qec::RealCiphertext ct;
  ct.values = {std::exp(1.0), 4.0};
  const auto out2 = qec::control({2.0, 0.5}, ct);
  REQUIRE(out2.values[0] == Approx(std::exp(2.0)).epsilon(1e-14));
  REQUIRE(out2.values[1] == Approx(2.0).epsilon(1e-15));

  qec::RealCiphertext bad;
  bad.values = {-1.0};
  REQUIRE_THROWS_AS(qec::control({1.0}, bad), std::invalid_argument);
}

TEST_CASE("decrypt basics") {
  qec::RealCiphertext ones;
  ones.values = {1.0, 1.0};
  REQUIRE(qec::decrypt(ones, plain_keys({5, -7})) == 0.0);
  qec::RealCiphertext bad;
  bad.values = {0.0};
  REQUIRE_THROWS_AS(qec::decrypt(bad, plain_keys({1})), std::invalid_argument);
}

TEST_CASE("matched keys: pipeline equals the scalar product exactly") {
  qec::Rng rng(20240917);
  for (int trial = 0; trial < 10'000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int w_b = 1 + static_cast<int>(rng.below(8));
    const std::int64_t top = std::int64_t{1} << (w_b - 1);
    std::vector<double> betas(n), x(n), gains(n);
    for (int i = 0; i < n; ++i) {
      std::int64_t b = 0;
      while (b == 0) b = static_cast<std::int64_t>(rng.below(2 * top + 1)) - top;
      betas[i] = static_cast<double>(b);
      x[i] = rng.uniform(-100.0, 100.0);
      gains[i] = rng.uniform(-5.0, 5.0);
    }
    const auto keys = plain_keys(betas);
    const double u = qec::decrypt(qec::control(gains, qec::encrypt(x, keys)), keys);
    const double want = dot(gains, x);
    REQUIRE(std::abs(u - want) <= 1e-9 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("mismatched keys: output follows the ratio-weighted sum") {
  qec::Rng rng(5150);
  for (int trial = 0; trial < 2'000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    std::vector<double> betas(n), hat_betas(n), x(n), gains(n);
    for (int i = 0; i < n; ++i) {
      betas[i] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (1.0 + static_cast<double>(rng.below(8)));
      hat_betas[i] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (1.0 + static_cast<double>(rng.below(8)));
      x[i] = rng.uniform(-20.0, 20.0);
      gains[i] = rng.uniform(-3.0, 3.0);
    }
    const double u = qec::decrypt(qec::control(gains, qec::encrypt(x, plain_keys(betas))),
                                  plain_keys(hat_betas));
    double want = 0.0;
    for (int i = 0; i < n; ++i) want += hat_betas[i] / betas[i] * gains[i] * x[i];
    REQUIRE(std::abs(u - want) <= 1e-9 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("ciphertext entries are strictly positive") {
  qec::Rng rng(31);
  for (int trial = 0; trial < 1'000; ++trial) {
    const double x = rng.uniform(-300.0, 300.0);
    const double beta = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (1.0 + static_cast<double>(rng.below(16)));
    const auto ct = qec::encrypt({x}, plain_keys({beta}));
    REQUIRE(ct.values[0] > 0.0);
    REQUIRE(std::isfinite(ct.values[0]));
  }
}

TEST_CASE("binary64 big-endian codec round-trips") {
  const std::vector<double> values = {1.0, -0.0, 3.14159, 1e-300, 8.98846567431158e307};
  const auto bytes = qec::encode_values_be(values);
  REQUIRE(bytes.size() == values.size() * 8);
  const auto back = qec::decode_values_be(bytes, static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    REQUIRE(std::memcmp(&back[i], &values[i], 8) == 0);
  }
  // 1.0 in big-endian binary64 starts with 0x3F 0xF0.
  REQUIRE(bytes[0] == 0x3F);
  REQUIRE(bytes[1] == 0xF0);
  REQUIRE_THROWS_AS(qec::decode_values_be(bytes, 4), std::runtime_error);
}

TEST_CASE("control rejects results outside double range") {
  // A huge ciphertext raised to a large gain overflows; a tiny one
  // underflows to zero.  Both must fail loudly instead of corrupting the
  // decryption downstream.
  qec::RealCiphertext big;
  big.values = {1e300};
  REQUIRE_THROWS_AS(qec::control({3.0}, big), std::range_error);
  qec::RealCiphertext tiny;
  tiny.values = {1e-300};
  REQUIRE_THROWS_AS(qec::control({3.0}, tiny), std::range_error);
}
