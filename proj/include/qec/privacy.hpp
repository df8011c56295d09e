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

#ifndef QEC_PRIVACY_HPP
#define QEC_PRIVACY_HPP

// Differential-privacy accounting for the key coefficients.  The stochastic
// quantizer is the mechanism: for key matrices differing in one coefficient
// by at most zeta (same sign), the ciphertext distributions differ in total
// variation by at most
//
//   Delta = zeta (1+alpha) ln^2(1+alpha) / xbar * 2^(w-1),
//
// an (eps = 0, Delta) guarantee.  Everything here is checked exactly
// through the quantizer's two-atom law rather than sampled.
//
// Two ambiguities are kept visible instead of resolved: the adjacency
// offset for opposite-sign pairs (the defining formula yields 2^(w_b+1),
// the accompanying prose 2^w_b), and whether xbar aggregates by max or by
// min across dimensions (min is conservative and the default here).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/linalg.hpp"
#include "qec/qec_quantized.hpp"
#include "qec/quantizer.hpp"

namespace qec {

enum class AdjacencyRule { formula, prose };
enum class XbarAggregation { min_conservative, max_paper };

inline double aggregate_xbar(std::span<const double> xbar, XbarAggregation agg) {
  if (xbar.empty()) throw std::invalid_argument("aggregate_xbar: empty");
  double out = xbar[0];
  for (double v : xbar)
    out = (agg == XbarAggregation::min_conservative) ? std::min(out, v) : std::max(out, v);
  return out;
}

// Location and budget of the single differing coefficient of an adjacent
// pair: time index t_star, dimension i_star.
struct AdjacencySpec {
  double zeta = 0.0;
  int i_star = -1;
  int t_star = -1;
};

// Key matrices are T x n (row t holds the coefficients of step t).  Two
// matrices are zeta-adjacent when they differ in exactly one element and the
// difference there passes the wrap-around distance test; the located slot is
// returned when adjacency holds.
inline std::optional<AdjacencySpec> find_adjacency(const Mat& e, const Mat& e_prime,
                                                   double zeta, int w_b,
                                                   AdjacencyRule rule = AdjacencyRule::formula) {
  if (e.rows != e_prime.rows || e.cols != e_prime.cols)
    throw std::invalid_argument("find_adjacency: shape mismatch");
  if (zeta < 0.0) throw std::invalid_argument("find_adjacency: zeta must be nonnegative");
  int diff_row = -1, diff_col = -1;
  for (int i = 0; i < e.rows; ++i)
    for (int j = 0; j < e.cols; ++j)
      if (e(i, j) != e_prime(i, j)) {
        if (diff_row >= 0) return std::nullopt;  // more than one differing element
        diff_row = i;
        diff_col = j;
      }
  if (diff_row < 0) return std::nullopt;  // identical matrices: nothing to protect

  const double beta = e(diff_row, diff_col);
  const double beta_prime = e_prime(diff_row, diff_col);
  const double sgn_product = (beta > 0.0 ? 1.0 : (beta < 0.0 ? -1.0 : 0.0)) *
                             (beta_prime > 0.0 ? 1.0 : (beta_prime < 0.0 ? -1.0 : 0.0));
  const double pow_wb = std::pow(2.0, w_b);
  double offset;
  if (rule == AdjacencyRule::formula) {
    offset = pow_wb * (1.0 - sgn_product);
  } else {
    offset = (sgn_product < 0.0) ? pow_wb : 0.0;
  }
  if (std::abs(std::abs(beta - beta_prime) - offset) > zeta) return std::nullopt;
  return AdjacencySpec{zeta, diff_col, diff_row};
}

inline bool is_adjacent(const Mat& e, const Mat& e_prime, double zeta, int w_b,
                        AdjacencyRule rule = AdjacencyRule::formula) {
  return find_adjacency(e, e_prime, zeta, w_b, rule).has_value();
}

// Privacy bound of the single-element mechanism.  Throws when the
// hypothesis zeta (1+alpha) ln^2(1+alpha) / xbar <= 2^-(w-1) fails: that
// regime has no guarantee, and a silent number would be misleading.
inline double delta_bound(double zeta, double alpha, double xbar_agg, int w) {
  if (zeta < 0.0) throw std::invalid_argument("delta_bound: zeta must be nonnegative");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("delta_bound: alpha outside (0, 1]");
  if (!(xbar_agg > 0.0)) throw std::invalid_argument("delta_bound: xbar must be positive");
  if (w < 2 || w > 32) throw std::invalid_argument("delta_bound: w outside [2, 32]");
  const double log1a = std::log1p(alpha);
  const double sensitivity = zeta * (1.0 + alpha) * log1a * log1a / xbar_agg;
  if (sensitivity > std::ldexp(1.0, -(w - 1)))
    throw std::domain_error("delta_bound: hypothesis violated, sensitivity " +
                            std::to_string(sensitivity) + " exceeds 2^-(w-1)");
  return std::ldexp(sensitivity, w - 1);
}

struct DpGapResult {
  double tv_gap = 0.0;        // exact sup over events of the probability gap
  double g_gap_bound = 0.0;   // 2^(w-1) |g(v) - g(v')|
  double delta = 0.0;         // analytic bound
  double zeta_effective = 0.0;
};

// Exact single-element verification: enumerates the two-atom laws of the
// ciphertext under beta and beta' and checks the whole inequality chain
//   TV <= 2^(w-1)|g(v)-g(v')| <= Delta.
// Requires a same-sign pair; the mean-value argument behind Delta does not
// cover sign flips across the excluded band.
inline DpGapResult verify_dp_exact(double x, double beta, double beta_prime,
                                   const QuantizedScenario& scen, int dim = 0,
                                   XbarAggregation agg = XbarAggregation::min_conservative) {
  scen.validate();
  if (dim < 0 || dim >= scen.dims()) throw std::invalid_argument("verify_dp_exact: bad dim");
  const double xbar_i = scen.xbar[dim];
  if (!(std::abs(x) < xbar_i))
    throw std::invalid_argument("verify_dp_exact: |x| must stay below xbar");
  if (beta * beta_prime <= 0.0)
    throw std::invalid_argument("verify_dp_exact: same-sign coefficient pair required");
  const double floor_mag = xbar_i / std::log1p(scen.alpha);
  if (std::abs(beta) < floor_mag || std::abs(beta_prime) < floor_mag)
    throw std::invalid_argument("verify_dp_exact: coefficient below the domain magnitude floor");

  DpGapResult out;
  out.zeta_effective = std::abs(beta - beta_prime);
  out.delta = delta_bound(out.zeta_effective, scen.alpha,
                          aggregate_xbar(scen.xbar, agg), scen.w);

  const double v = std::exp(x / beta);
  const double v_prime = std::exp(x / beta_prime);
  const auto atoms = atom_distribution(v, scen.w);
  const auto atoms_prime = atom_distribution(v_prime, scen.w);
  out.tv_gap = total_variation(atoms, atoms_prime);
  out.g_gap_bound = std::ldexp(std::abs(g_warp(v) - g_warp(v_prime)), scen.w - 1);

  if (out.tv_gap > out.g_gap_bound + 1e-9)
    throw std::runtime_error("verify_dp_exact: rounder Lipschitz link violated");
  if (out.tv_gap > out.delta + 1e-9)
    throw std::runtime_error("verify_dp_exact: measured gap exceeds the privacy bound");
  return out;
}

struct DpReport {
  double delta = 0.0;  // bound achieved at the top of the alpha interval
  bool feasible = false;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;            // formula value
  double alpha_hi_effective = 0.0;  // after the alpha <= 1 and grid clamps
  int w_min = 0;
};

// Error bound of the quantized loop with every coefficient at its magnitude
// cap: 5 n (2^(w_b-1) + xbar/ln(1+alpha))^2 delta_max^2 / 2^(2w).
inline double worst_case_mse_bound(int n, int w_b, double alpha, double xbar, double delta_max,
                                  int w) {
  const double beta_cap = std::pow(2.0, w_b - 1) + xbar / std::log1p(alpha);
  return 5.0 * n * beta_cap * beta_cap * delta_max * delta_max / std::pow(4.0, w);
}

// Joint parameter chooser for an error target E_g, privacy target Delta_g
// and adjacency budget zeta_g.  The bandwidth bound uses the privacy ratio
// zeta_g / Delta_g: a tighter privacy target demands more bits.  (The ratio
// also circulates inverted, which would let the demand *drop* with the
// target and leave the alpha interval empty; the substitution checks below
// pin the orientation used here.)
inline DpReport choose_params(double error_target, double privacy_target,
                              double adjacency_budget, int n, double delta_max, double xbar,
                              int w_b) {
  if (!(error_target > 0.0 && privacy_target > 0.0 && adjacency_budget > 0.0 &&
        delta_max > 0.0 && xbar > 0.0) ||
      n < 1 || w_b < 1)
    throw std::invalid_argument("choose_params: all inputs must be positive");

  const double sqrt5n = std::sqrt(5.0 * n);
  const double term_grid =
      w_b + 1.0 + std::log2(sqrt5n * delta_max / error_target);
  const double term_privacy =
      std::log2(20.0 * n * xbar * delta_max * delta_max * adjacency_budget /
                (error_target * error_target * privacy_target));

  DpReport rep;
  rep.w_min =
      std::max(2, static_cast<int>(std::ceil(std::max(term_grid, term_privacy))));

  const double pw = std::pow(2.0, rep.w_min);
  rep.alpha_lo = 2.0 * sqrt5n * xbar * delta_max / (pw * error_target);
  const double exponent = std::min(xbar / std::pow(2.0, w_b - 1),
                                   std::sqrt(privacy_target * xbar / (pw * adjacency_budget)));
  rep.alpha_hi = std::expm1(exponent);
  rep.alpha_hi_effective =
      std::min(rep.alpha_hi, 1.0 - std::ldexp(1.0, -(rep.w_min - 1)));
  rep.feasible = rep.w_min <= 32 && rep.alpha_lo > 0.0 &&
                 rep.alpha_lo <= rep.alpha_hi_effective;
  if (rep.feasible)
    rep.delta = delta_bound(adjacency_budget, rep.alpha_hi_effective, xbar, rep.w_min);
  return rep;
}

struct ChooserCheck {
  bool hypothesis_ok = false;
  bool privacy_ok = false;
  bool mse_ok = false;
  double delta_at_hi = 0.0;
  double mse_at_lo = 0.0;

  bool ok() const { return hypothesis_ok && privacy_ok && mse_ok; }
};

// Re-substitutes a chooser output into the two inequalities it promises:
// privacy at the top of the alpha interval (Delta grows with alpha) and the
// error bound at the bottom (it shrinks with alpha).
inline ChooserCheck check_chooser_output(const DpReport& rep, double error_target,
                                      double privacy_target, double adjacency_budget, int n,
                                      double delta_max, double xbar, int w_b) {
  ChooserCheck chk;
  if (!rep.feasible) return chk;
  try {
    chk.delta_at_hi =
        delta_bound(adjacency_budget, rep.alpha_hi_effective, xbar, rep.w_min);
    chk.hypothesis_ok = true;
  } catch (const std::domain_error&) {
    return chk;
  }
  chk.privacy_ok = chk.delta_at_hi <= privacy_target * (1.0 + 1e-12);
  chk.mse_at_lo = worst_case_mse_bound(n, w_b, rep.alpha_lo, xbar, delta_max, rep.w_min);
  chk.mse_ok = chk.mse_at_lo <= error_target * error_target * (1.0 + 1e-12);
  return chk;
}

}  // namespace qec

#endif  // QEC_PRIVACY_HPP
