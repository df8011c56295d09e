#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "qec/quantum_channel.hpp"

using qec::BellStateSpec;

TEST_CASE("error probability of reference states") {
  const double r = 1.0 / std::sqrt(2.0);
  REQUIRE(qec::error_probability(BellStateSpec(r, 0, 0, r)) == Approx(0.0).margin(1e-15));
  REQUIRE(qec::error_probability(BellStateSpec(0, r, r, 0)) == Approx(1.0).margin(1e-12));
  REQUIRE(qec::error_probability(BellStateSpec(std::sqrt(0.49), std::sqrt(0.01), std::sqrt(0.01),
                                               std::sqrt(0.49))) == Approx(0.02).margin(1e-12));
}

TEST_CASE("non-normalized states are rejected") {
  REQUIRE_THROWS_AS(BellStateSpec(0.5, 0.5, 0.5, 0.6), std::invalid_argument);
  REQUIRE_THROWS_AS(BellStateSpec::symmetric_with_error(-0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(BellStateSpec::symmetric_with_error(1.5), std::invalid_argument);
}

TEST_CASE("perfect state yields identical keys, antistate complements") {
  qec::Rng rng(1);
  const auto perfect = BellStateSpec::perfect();
  for (int rep = 0; rep < 20; ++rep) {
    const auto pair = qec::sample_key_pair(perfect, 3, 4, rep, rng);
    REQUIRE(pair.sensor_bits == pair.actuator_bits);
  }
  const double r = 1.0 / std::sqrt(2.0);
  const BellStateSpec anti(0, r, r, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pair = qec::sample_key_pair(anti, 3, 4, rep, rng);
    for (int i = 0; i < pair.length(); ++i)
      REQUIRE(pair.sensor_bits[i] == (1 - pair.actuator_bits[i]));
  }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const auto state = BellStateSpec::symmetric_with_error(0.1);
  qec::Rng a(42), b(42);
  const auto pa = qec::sample_key_pair(state, 4, 6, 9, a);
  const auto pb = qec::sample_key_pair(state, 4, 6, 9, b);
  REQUIRE(pa.sensor_bits == pb.sensor_bits);
  REQUIRE(pa.actuator_bits == pb.actuator_bits);
}

TEST_CASE("monte carlo flip rate matches the analytic probability") {
  const auto state = BellStateSpec(std::sqrt(0.45), std::sqrt(0.05), std::sqrt(0.05),
                                   std::sqrt(0.45));
  qec::Rng rng(1234);
  const int bits = 1'000'000;
  const auto pair = qec::sample_key_pair(state, 1, bits, 0, rng);
  int flips = 0;
  for (int i = 0; i < bits; ++i) flips += (pair.sensor_bits[i] != pair.actuator_bits[i]);
  REQUIRE(qec::within_binomial_ci(static_cast<double>(flips) / bits, 0.1, bits, 4.0));
}

TEST_CASE("joint outcome frequencies converge to the squared amplitudes") {
  const BellStateSpec state(std::sqrt(0.4), std::sqrt(0.1), std::sqrt(0.2), std::sqrt(0.3));
  qec::Rng rng(77);
  const int bits = 400'000;
  const auto pair = qec::sample_key_pair(state, 1, bits, 0, rng);
  double counts[2][2] = {{0, 0}, {0, 0}};
  for (int i = 0; i < bits; ++i) counts[pair.sensor_bits[i]][pair.actuator_bits[i]] += 1.0;
  REQUIRE(qec::within_binomial_ci(counts[0][0] / bits, 0.4, bits, 4.5));
  REQUIRE(qec::within_binomial_ci(counts[0][1] / bits, 0.1, bits, 4.5));
  REQUIRE(qec::within_binomial_ci(counts[1][0] / bits, 0.2, bits, 4.5));
  REQUIRE(qec::within_binomial_ci(counts[1][1] / bits, 0.3, bits, 4.5));
}

TEST_CASE("statistics report: perfect state has flip rate exactly zero") {
  qec::Rng rng(5);
  std::vector<qec::QuantumKeyPair> pairs;
  for (int t = 0; t < 100; ++t)
    pairs.push_back(qec::sample_key_pair(BellStateSpec::perfect(), 3, 4, t, rng));
  const auto stats = qec::empirical_bit_statistics(pairs);
  REQUIRE(stats.flip_rate == 0.0);
  REQUIRE(stats.total_bits == 100 * 12);
}

TEST_CASE("statistics report: symmetric state marginal is one half") {
  qec::Rng rng(8);
  std::vector<qec::QuantumKeyPair> pairs;
  const auto state = BellStateSpec::symmetric_with_error(0.02);
  const int reps = 2500;  // 2500 * 400 = 1e6 bits
  for (int t = 0; t < reps; ++t) pairs.push_back(qec::sample_key_pair(state, 4, 100, t, rng));
  const auto stats = qec::empirical_bit_statistics(pairs);
  REQUIRE(qec::within_binomial_ci(stats.sensor_one_frequency, 0.5, stats.total_bits, 4.0));
  REQUIRE(qec::within_binomial_ci(stats.flip_rate, 0.02, stats.total_bits, 4.0));
}

TEST_CASE("symmetric states: flip events independent of sensor bits") {
  qec::Rng rng(31337);
  std::vector<qec::QuantumKeyPair> pairs;
  const auto state = BellStateSpec::symmetric_with_error(0.1);
  for (int t = 0; t < 1000; ++t) pairs.push_back(qec::sample_key_pair(state, 10, 100, t, rng));
  const auto stats = qec::empirical_bit_statistics(pairs);
  REQUIRE(stats.total_bits == 1'000'000);
  REQUIRE(stats.flip_independence_pvalue > 0.01);
  REQUIRE(stats.position_uniformity_pvalue > 0.01);
}

TEST_CASE("statistics preconditions") {
  REQUIRE_THROWS_AS(qec::empirical_bit_statistics({}), std::invalid_argument);
  qec::Rng rng(3);
  std::vector<qec::QuantumKeyPair> tiny = {
      qec::sample_key_pair(BellStateSpec::perfect(), 1, 4, 0, rng)};
  REQUIRE_THROWS_AS(qec::empirical_bit_statistics(tiny), std::invalid_argument);
}

TEST_CASE("key dump format is stable") {
  qec::QuantumKeyPair pair;
  pair.t = 7;
  pair.n = 2;
  pair.w_b = 4;
  // Groups (1,0,1,1) and (0,0,0,1): transmission order 10110001 -> 0xb1.
  pair.sensor_bits = {1, 0, 1, 1, 0, 0, 0, 1};
  pair.actuator_bits = {1, 0, 1, 1, 0, 0, 0, 0};
  REQUIRE(qec::dump_key_pair(pair) == "t=7 se=b1 ac=b0");

  // Padding: 6 bits 101100 -> byte 10110000 = 0xb0.
  qec::QuantumKeyPair padded;
  padded.t = 0;
  padded.n = 2;
  padded.w_b = 3;
  padded.sensor_bits = {1, 0, 1, 1, 0, 0};
  padded.actuator_bits = {1, 0, 1, 1, 0, 0};
  REQUIRE(qec::dump_key_pair(padded) == "t=0 se=b0 ac=b0");
}
