#include <catch2/catch.hpp>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "qec/keymat.hpp"
#include "qec/rng.hpp"
#include "qec/stats.hpp"

namespace {

std::vector<std::uint8_t> bits(std::initializer_list<int> msb_first) {
  std::vector<std::uint8_t> out;
  for (int b : msb_first) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

}  // namespace

TEST_CASE("plain coefficients for two-bit groups") {
  REQUIRE(qec::beta_plain(bits({0, 0})) == 1);
  REQUIRE(qec::beta_plain(bits({0, 1})) == 2);
  REQUIRE(qec::beta_plain(bits({1, 0})) == -2);
  REQUIRE(qec::beta_plain(bits({1, 1})) == -1);
}

TEST_CASE("plain coefficients are never zero and cover the symmetric range") {
  for (int w_b = 1; w_b <= 10; ++w_b) {
    const std::int64_t top = std::int64_t{1} << (w_b - 1);
    std::map<std::int64_t, int> seen;
    for (std::uint32_t mask = 0; mask < (1u << w_b); ++mask) {
      std::vector<std::uint8_t> g(w_b);
      for (int k = 0; k < w_b; ++k) g[k] = (mask >> (w_b - 1 - k)) & 1u;
      const std::int64_t beta = qec::beta_plain(g);
      REQUIRE(beta != 0);
      REQUIRE(beta >= -top);
      REQUIRE(beta <= top);
      seen[beta]++;
    }
    REQUIRE(seen.size() == (1u << w_b));  // bijective, hence uniform
  }
}

TEST_CASE("quantized coefficients add a sign-matched offset") {
  const double ln2 = std::log(2.0);
  REQUIRE(qec::beta_quantized(bits({0, 0}), 1.0, ln2) == Approx(2.0).margin(1e-12));
  REQUIRE(qec::beta_quantized(bits({1, 0}), 1.0, ln2) == Approx(-3.0).margin(1e-12));
  REQUIRE_THROWS_AS(qec::beta_quantized(bits({0, 1}), std::exp(1.0) - 1.0, 1.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(qec::beta_quantized(bits({0, 1}), 0.0, 1.0), std::invalid_argument);

  // |beta| >= xbar / ln(1+alpha) for every pattern.
  qec::Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = rng.uniform(0.05, 1.0);
    const double xbar = rng.uniform(0.1, 10.0);
    std::vector<std::uint8_t> g(4);
    for (auto& b : g) b = static_cast<std::uint8_t>(rng.below(2));
    const double beta = qec::beta_quantized(g, alpha, xbar);
    REQUIRE(std::abs(beta) >= xbar / std::log1p(alpha) - 1e-12);
  }
}

TEST_CASE("beta moments by enumeration") {
  const auto m1 = qec::beta_moments(1);
  REQUIRE(m1.mean_square == Approx(1.0));
  REQUIRE(m1.mean_inverse_square == Approx(1.0));

  const auto m2 = qec::beta_moments(2);
  REQUIRE(m2.mean_square == Approx(2.5));
  REQUIRE(m2.mean_inverse_square == Approx(0.625));

  REQUIRE_THROWS_AS(qec::beta_moments(25), std::invalid_argument);
  REQUIRE_THROWS_AS(qec::beta_moments(0), std::invalid_argument);
}

TEST_CASE("mean square matches the closed form (N+1)(2N+1)/6") {
  for (int w_b = 1; w_b <= 12; ++w_b) {
    const double N = std::pow(2.0, w_b - 1);
    const double closed = (N + 1.0) * (2.0 * N + 1.0) / 6.0;
    REQUIRE(qec::beta_moments(w_b).mean_square == Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("quantized mean square matches the offset expansion") {
  const int w_b = 3;
  const double alpha = 0.5, xbar = 2.0;
  const double off = xbar / std::log1p(alpha);
  const double N = 4.0;
  // E[(|b|+off)^2] with |b| uniform on 1..N.
  const double e_abs = (N + 1.0) / 2.0;
  const double e_sq = (N + 1.0) * (2.0 * N + 1.0) / 6.0;
  const double expected = e_sq + 2.0 * off * e_abs + off * off;
  REQUIRE(qec::beta_quantized_mean_square(w_b, alpha, xbar) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("sampled coefficients are uniform over the key alphabet") {
  const int w_b = 3;
  qec::Rng rng(101);
  const auto state = qec::BellStateSpec::perfect();
  std::map<std::int64_t, double> counts;
  const int draws = 125'000;  // 8 dims each -> 1e6 coefficients
  for (int t = 0; t < draws; ++t) {
    const auto pair = qec::sample_key_pair(state, 8, w_b, t, rng);
    const auto coeff = qec::plain_coefficients(pair, qec::KeySide::sensor);
    for (double b : coeff.betas) counts[static_cast<std::int64_t>(b)]++;
  }
  REQUIRE(counts.size() == 8);
  std::vector<double> observed, expected;
  for (const auto& [value, count] : counts) {
    observed.push_back(count);
    expected.push_back(draws * 8 / 8.0);
  }
  const double stat = qec::chi_square_statistic(observed, expected);
  REQUIRE(qec::chi_square_pvalue(stat, 7) > 0.01);
}

TEST_CASE("coefficients for distinct dimensions and steps are uncorrelated") {
  const int w_b = 2;
  qec::Rng rng(99);
  const auto state = qec::BellStateSpec::perfect();
  const int draws = 50'000;
  double sum_xy = 0, sum_x = 0, sum_y = 0, sum_x2 = 0, sum_y2 = 0;
  for (int t = 0; t < draws; ++t) {
    const auto pair = qec::sample_key_pair(state, 2, w_b, t, rng);
    const auto coeff = qec::plain_coefficients(pair, qec::KeySide::sensor);
    // Across dimensions at the same step.
    sum_xy += coeff.betas[0] * coeff.betas[1];
    sum_x += coeff.betas[0];
    sum_y += coeff.betas[1];
    sum_x2 += coeff.betas[0] * coeff.betas[0];
    sum_y2 += coeff.betas[1] * coeff.betas[1];
  }
  const double n = draws;
  const double corr = (sum_xy / n - (sum_x / n) * (sum_y / n)) /
                      std::sqrt((sum_x2 / n - (sum_x / n) * (sum_x / n)) *
                                (sum_y2 / n - (sum_y / n) * (sum_y / n)));
  REQUIRE(std::abs(corr) < 4.0 / std::sqrt(n));
}

TEST_CASE("coefficient extraction follows group layout") {
  qec::QuantumKeyPair pair;
  pair.t = 3;
  pair.n = 2;
  pair.w_b = 2;
  pair.sensor_bits = {0, 1, 1, 1};    // groups (0,1) and (1,1) -> 2, -1
  pair.actuator_bits = {0, 0, 1, 0};  // groups (0,0) and (1,0) -> 1, -2
  const auto se = qec::plain_coefficients(pair, qec::KeySide::sensor);
  const auto ac = qec::plain_coefficients(pair, qec::KeySide::actuator);
  REQUIRE(se.betas == std::vector<double>{2.0, -1.0});
  REQUIRE(ac.betas == std::vector<double>{1.0, -2.0});
  REQUIRE(se.t == 3);
}

TEST_CASE("coefficients at consecutive steps are uncorrelated") {
  const int w_b = 2;
  qec::Rng rng(4242);
  const auto state = qec::BellStateSpec::perfect();
  const int draws = 50'000;
  double sum_xy = 0, sum_x = 0, sum_y = 0, sum_x2 = 0, sum_y2 = 0;
  double prev = 0.0;
  for (int t = 0; t < draws + 1; ++t) {
    const auto pair = qec::sample_key_pair(state, 1, w_b, t, rng);
    const double beta = qec::plain_coefficients(pair, qec::KeySide::sensor).betas[0];
    if (t > 0) {
      sum_xy += prev * beta;
      sum_x += prev;
      sum_y += beta;
      sum_x2 += prev * prev;
      sum_y2 += beta * beta;
    }
    prev = beta;
  }
  const double n = draws;
  const double corr = (sum_xy / n - (sum_x / n) * (sum_y / n)) /
                      std::sqrt((sum_x2 / n - (sum_x / n) * (sum_x / n)) *
                                (sum_y2 / n - (sum_y / n) * (sum_y / n)));
  REQUIRE(std::abs(corr) < 4.0 / std::sqrt(n));
}
