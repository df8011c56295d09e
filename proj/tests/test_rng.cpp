#include <catch2/catch.hpp>

#include <array>
#include <cstdint>

#include "qec/rng.hpp"
#include "qec/stats.hpp"

namespace {

// Frozen first outputs of the repo-wide generator for the reference seed.
// These pin the exact algorithm (xoshiro256** seeded via SplitMix64) so any
// drift breaks reproducibility loudly.
constexpr std::array<std::uint64_t, 16> kGoldenSeed42 = {
    0x15780b2e0c2ec716ULL, 0x6104d9866d113a7eULL, 0xae17533239e499a1ULL,
    0xecb8ad4703b360a1ULL, 0xfde6dc7fe2ec5e64ULL, 0xc50da53101795238ULL,
    0xb82154855a65ddb2ULL, 0xd99a2743ebe60087ULL, 0xc2e96e726e97647eULL,
    0x9556615f775fbc3dULL, 0xaeb53b340c103971ULL, 0x4a69db9873af8965ULL,
    0xcd0feda93006c6b6ULL, 0x52480865a4b42742ULL, 0xb60dec3bf2d887cdULL,
    0xe0b55a68b96677faULL,
};

}  // namespace

TEST_CASE("rng reproduces golden outputs for the reference seed") {
  qec::Rng rng(42);
  for (std::uint64_t expected : kGoldenSeed42) REQUIRE(rng.next_u64() == expected);
}

TEST_CASE("rng streams are deterministic and seed-separated") {
  qec::Rng a(123456789);
  qec::Rng b(123456789);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  qec::Rng c(123456790);
  bool any_diff = false;
  qec::Rng a2(123456789);
  for (int i = 0; i < 4; ++i) any_diff |= (a2.next_u64() != c.next_u64());
  REQUIRE(any_diff);
}

TEST_CASE("substreams are independent of parent consumption") {
  qec::Rng parent(99);
  parent.next_u64();
  parent.next_u64();
  qec::Rng child = parent.substream(3);

  qec::Rng fresh_parent(99);
  qec::Rng child2 = fresh_parent.substream(3);
  for (int i = 0; i < 16; ++i) REQUIRE(child.next_u64() == child2.next_u64());

  REQUIRE(qec::derive_seed(99, 0) != qec::derive_seed(99, 1));
}

TEST_CASE("uniform01 lies in [0,1) and has the right mean") {
  qec::Rng rng(7);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  REQUIRE(qec::within_binomial_ci(sum / n, 0.5, n, 5.0));
}

TEST_CASE("normal draws have unit variance") {
  qec::Rng rng(11);
  const int n = 100000;
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.normal();
  const double m = qec::mean(xs);
  const double v = qec::sample_variance(xs);
  REQUIRE(std::abs(m) < 0.02);
  REQUIRE(std::abs(v - 1.0) < 0.03);
}
