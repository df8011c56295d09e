#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "qec/privacy.hpp"
#include "qec/rng.hpp"

namespace {

qec::Mat key_matrix(int t_steps, int n, double fill) {
  qec::Mat m(t_steps, n);
  for (double& v : m.a) v = fill;
  return m;
}

qec::QuantizedScenario dp_scenario(int w, int w_b, double alpha, double xbar) {
  qec::QuantizedScenario s;
  s.w = w;
  s.w_b = w_b;
  s.alpha = alpha;
  s.gains = {1.0};
  s.delta = {1.5};
  s.xbar = {xbar};
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("adjacency: identical, single-slot, and multi-slot cases") {
  const auto e = key_matrix(4, 3, 2.0);
  REQUIRE_FALSE(qec::is_adjacent(e, e, 1.0, 4));

  auto e1 = e;
  e1(2, 1) = 2.4;  // same sign, difference 0.4
  REQUIRE(qec::is_adjacent(e, e1, 0.8, 4));
  REQUIRE_FALSE(qec::is_adjacent(e, e1, 0.3, 4));

  auto e2 = e1;
  e2(0, 0) = 5.0;
  REQUIRE_FALSE(qec::is_adjacent(e, e2, 100.0, 4));

  qec::Mat wrong(3, 3);
  REQUIRE_THROWS_AS(qec::is_adjacent(e, wrong, 1.0, 4), std::invalid_argument);
}

TEST_CASE("adjacency: opposite signs diverge between formula and prose") {
  // beta = 5, beta' = -5, w_b = 3: |beta - beta'| = 10; the formula offset
  // is 2^(w_b+1) = 16, the prose offset 2^w_b = 8.
  const auto e = key_matrix(1, 1, 5.0);
  auto e_neg = e;
  e_neg(0, 0) = -5.0;
  REQUIRE(qec::is_adjacent(e, e_neg, 6.0, 3, qec::AdjacencyRule::formula));
  REQUIRE_FALSE(qec::is_adjacent(e, e_neg, 5.0, 3, qec::AdjacencyRule::formula));
  REQUIRE(qec::is_adjacent(e, e_neg, 2.0, 3, qec::AdjacencyRule::prose));
  REQUIRE_FALSE(qec::is_adjacent(e, e_neg, 1.0, 3, qec::AdjacencyRule::prose));
}

TEST_CASE("delta bound arithmetic and hypothesis guard") {
  REQUIRE(qec::delta_bound(0.0, 0.5, 1.0, 8) == 0.0);
  // 0.01 * 1.5 * ln^2(1.5) * 128
  const double want = 0.01 * 1.5 * std::pow(std::log(1.5), 2) * 128.0;
  REQUIRE(qec::delta_bound(0.01, 0.5, 1.0, 8) == Approx(want).epsilon(1e-12));
  REQUIRE(want == Approx(0.3157).margin(2e-4));

  // Vanishing alpha kills the bound.
  REQUIRE(qec::delta_bound(0.01, 1e-9, 1.0, 8) < 1e-17);

  // Hypothesis violation is loud, not silent.
  REQUIRE_THROWS_AS(qec::delta_bound(10.0, 0.5, 1.0, 8), std::domain_error);
}

TEST_CASE("xbar aggregation is conservative by default") {
  const std::vector<double> xb = {2.0, 0.5, 1.0};
  REQUIRE(qec::aggregate_xbar(xb, qec::XbarAggregation::min_conservative) == 0.5);
  REQUIRE(qec::aggregate_xbar(xb, qec::XbarAggregation::max_paper) == 2.0);
  // Smaller aggregate -> larger (never smaller) reported Delta.
  REQUIRE(qec::delta_bound(0.001, 0.5, 0.5, 8) > qec::delta_bound(0.001, 0.5, 2.0, 8));
}

TEST_CASE("exact verification: degenerate pairs have zero gap") {
  const auto scen = dp_scenario(8, 4, 0.5, 40.0);
  const auto same = qec::verify_dp_exact(1.0, 120.0, 120.0, scen);
  REQUIRE(same.tv_gap == 0.0);
  // x = 0: both ciphertext laws are the point mass at one.
  const auto zero_x = qec::verify_dp_exact(0.0, 120.0, 121.0, scen);
  REQUIRE(zero_x.tv_gap == 0.0);
  REQUIRE(zero_x.delta >= 0.0);
}

TEST_CASE("exact verification rejects malformed pairs") {
  const auto scen = dp_scenario(8, 4, 0.5, 40.0);
  REQUIRE_THROWS_AS(qec::verify_dp_exact(1.0, 120.0, -120.0, scen), std::invalid_argument);
  REQUIRE_THROWS_AS(qec::verify_dp_exact(45.0, 120.0, 121.0, scen), std::invalid_argument);
  REQUIRE_THROWS_AS(qec::verify_dp_exact(1.0, 10.0, 11.0, scen), std::invalid_argument);
}

TEST_CASE("randomized adjacent pairs honor the whole inequality chain") {
  qec::Rng rng(2025);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = 3 + static_cast<int>(rng.below(8));  // up to 10
    const int w_b = 2 + static_cast<int>(rng.below(4));
    const double alpha_cap = std::min(0.9, 1.0 - std::ldexp(1.0, -(w - 1)) - 1e-9);
    const double alpha = rng.uniform(0.1, alpha_cap);
    const double zeta = rng.uniform(0.01, 1.0);
    // xbar chosen so the hypothesis holds with slack factor >= 1.
    const double slack = rng.uniform(1.0, 8.0);
    const double l1a = std::log1p(alpha);
    const double xbar = zeta * (1.0 + alpha) * l1a * l1a * std::ldexp(1.0, w - 1) * slack;

    qec::QuantizedScenario scen;
    scen.w = w;
    scen.w_b = w_b;
    scen.alpha = alpha;
    scen.gains = {1.0};
    scen.delta = {1.0 + std::ldexp(1.0, -(w - 1))};
    scen.xbar = {xbar};
    scen.validate();

    const double floor_mag = xbar / l1a;
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const double beta =
        sign * (floor_mag + 1.0 + rng.uniform(0.0, std::pow(2.0, w_b - 1) - 1.0));
    double beta_prime = beta + sign * rng.uniform(0.0, zeta);
    const double x = rng.uniform(-0.999 * xbar, 0.999 * xbar);

    const auto res = qec::verify_dp_exact(x, beta, beta_prime, scen);
    REQUIRE(res.tv_gap <= res.g_gap_bound + 1e-9);
    REQUIRE(res.g_gap_bound <= res.delta + 1e-9);
    REQUIRE(res.tv_gap <= res.delta + 1e-9);
  }
}

TEST_CASE("parameter chooser: concrete feasible instance") {
  // n=3, delta_max=63, xbar=1, w_b=4, E_g=0.1, Delta_g=0.1, zeta_g=0.5.
  const auto rep = qec::choose_params(0.1, 0.1, 0.5, 3, 63.0, 1.0, 4);
  REQUIRE(rep.feasible);
  REQUIRE(rep.w_min == 27);
  REQUIRE(rep.alpha_lo == Approx(3.636e-5).epsilon(0.01));
  REQUIRE(rep.alpha_hi == Approx(3.8601e-5).epsilon(0.01));
  REQUIRE(rep.alpha_lo <= rep.alpha_hi_effective);

  const auto chk = qec::check_chooser_output(rep, 0.1, 0.1, 0.5, 3, 63.0, 1.0, 4);
  REQUIRE(chk.ok());
  REQUIRE(chk.delta_at_hi <= 0.1);
  REQUIRE(chk.mse_at_lo <= 0.01 + 1e-15);
}

TEST_CASE("parameter chooser: re-substitution holds over random feasible inputs") {
  qec::Rng rng(909);
  int feasible_seen = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const double e_g = rng.uniform(0.01, 1.0);
    const double d_g = rng.uniform(0.01, 1.0);
    const double z_g = rng.uniform(0.05, 2.0);
    const int n = 1 + static_cast<int>(rng.below(4));
    const double delta_max = rng.uniform(1.0, 80.0);
    const double xbar = rng.uniform(0.5, 20.0);
    const int w_b = 2 + static_cast<int>(rng.below(5));
    const auto rep = qec::choose_params(e_g, d_g, z_g, n, delta_max, xbar, w_b);
    if (!rep.feasible) continue;
    ++feasible_seen;
    const auto chk = qec::check_chooser_output(rep, e_g, d_g, z_g, n, delta_max, xbar, w_b);
    REQUIRE(chk.ok());
  }
  REQUIRE(feasible_seen > 50);
}

TEST_CASE("parameter chooser: monotonicity in the error target") {
  const auto loose = qec::choose_params(0.5, 0.1, 0.5, 3, 63.0, 1.0, 4);
  const auto tight = qec::choose_params(0.05, 0.1, 0.5, 3, 63.0, 1.0, 4);
  REQUIRE(tight.w_min >= loose.w_min);
}

TEST_CASE("parameter chooser: no privacy demand leaves the grid term in charge") {
  // With privacy_target huge the interval's upper end comes from the
  // xbar / 2^(w_b-1) branch of the min.
  const double xbar = 1.0;
  const int w_b = 4;
  const auto rep = qec::choose_params(0.1, 1e12, 1e-6, 3, 63.0, xbar, w_b);
  REQUIRE(rep.alpha_hi == Approx(std::expm1(xbar / 8.0)).epsilon(1e-12));
}

TEST_CASE("trade-off direction: privacy worsens and error improves with alpha") {
  const double zeta = 0.001, xbar = 1.0;
  const int w = 10, w_b = 4, n = 3;
  double prev_delta = -1.0, prev_mse = 1e300;
  for (double alpha : {0.1, 0.2, 0.4, 0.6, 0.8}) {
    const double delta = qec::delta_bound(zeta, alpha, xbar, w);
    const double mse = qec::worst_case_mse_bound(n, w_b, alpha, xbar, 2.0, w);
    REQUIRE(delta > prev_delta);
    REQUIRE(mse < prev_mse);
    prev_delta = delta;
    prev_mse = mse;
  }
}

TEST_CASE("two-step joint enumeration smoke test") {
  // Controller randomness is independent of the sensor draw, so the joint
  // law of (sensor word, controller word) factors through the sensor word
  // and post-processing cannot widen the gap.
  const auto scen = dp_scenario(4, 3, 0.5, 30.0);
  const double x = 10.0;
  const double beta = 80.0, beta_prime = 80.4;

  auto joint = [&](double b) {
    std::vector<double> probs((1u << scen.w) * (1u << scen.w), 0.0);
    const auto sensor_atoms = qec::atom_distribution(std::exp(x / b), scen.w);
    for (const auto& sa : sensor_atoms) {
      const double z = std::pow(qec::g_warp_inverse(sa.word.val()),
                                scen.gains[0] / scen.delta[0]);
      for (const auto& ca : qec::atom_distribution(z, scen.w))
        probs[sa.word.code * (1u << scen.w) + ca.word.code] += sa.probability * ca.probability;
    }
    return probs;
  };
  const auto pa = joint(beta);
  const auto pb = joint(beta_prime);
  double joint_tv = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i] > pb[i]) joint_tv += pa[i] - pb[i];

  const auto single = qec::verify_dp_exact(x, beta, beta_prime, scen);
  REQUIRE(joint_tv <= single.tv_gap + 1e-12);
  REQUIRE(joint_tv <= single.delta + 1e-9);
}

TEST_CASE("adjacency search reports the differing slot") {
  auto e = key_matrix(5, 3, 4.0);
  auto e2 = e;
  e2(3, 1) = 4.25;
  const auto spec = qec::find_adjacency(e, e2, 0.5, 4);
  REQUIRE(spec.has_value());
  REQUIRE(spec->t_star == 3);
  REQUIRE(spec->i_star == 1);
  REQUIRE(spec->zeta == 0.5);
  REQUIRE_FALSE(qec::find_adjacency(e, e, 0.5, 4).has_value());
}
