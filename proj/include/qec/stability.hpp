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

#ifndef QEC_STABILITY_HPP
#define QEC_STABILITY_HPP

// Mean-square stability analysis of the encrypted loop under key-bit flips.
// The second moment of the state propagates linearly through a Kronecker
// matrix
//
//   M(p) = M0 (x) M0  +/-  2p (M1 (x) M0 + M0 (x) M1) + (4p^2 + h(p)) M1 (x) M1
//
// with M0 = A + BK and M1 = BK.  A similarity-scaled infinity norm with
// ||M0||_* <= (1 + rho(M0))/2 turns that into an explicit flip-probability
// threshold below which E[x x^T] -> 0.
//
// Two exposed conventions mirror two unresolved choices in the error model:
// the cross-term sign (the per-key relative error has conditional mean -2p,
// while +2p also circulates) and the variance constant (1/E[beta^2] against
// E[1/beta^2], which differ by Jensen).  A Monte-Carlo oracle over the real
// pipeline selects the sign empirically.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qec/keymat.hpp"
#include "qec/linalg.hpp"
#include "qec/qec_core.hpp"
#include "qec/quantum_channel.hpp"
#include "qec/stats.hpp"

namespace qec {

struct PlantModel {
  Mat A;                  // n x n
  std::vector<double> B;  // n x 1
  GainRow K;              // 1 x n

  int dims() const { return A.rows; }

  void validate() const {
    if (A.rows != A.cols || A.rows < 1) throw std::invalid_argument("plant: A must be square");
    if (static_cast<int>(B.size()) != A.rows || static_cast<int>(K.size()) != A.rows)
      throw std::invalid_argument("plant: B/K dimension mismatch");
    if (!A.finite()) throw std::invalid_argument("plant: non-finite A");
    for (double v : B)
      if (!std::isfinite(v)) throw std::invalid_argument("plant: non-finite B");
    for (double v : K)
      if (!std::isfinite(v)) throw std::invalid_argument("plant: non-finite K");
  }

  Mat closed_loop() const {  // M0 = A + B K
    Mat m = A;
    for (int i = 0; i < dims(); ++i)
      for (int j = 0; j < dims(); ++j) m(i, j) += B[i] * K[j];
    return m;
  }

  Mat input_map() const {  // M1 = B K
    Mat m(dims(), dims());
    for (int i = 0; i < dims(); ++i)
      for (int j = 0; j < dims(); ++j) m(i, j) = B[i] * K[j];
    return m;
  }
};

inline double closed_loop_radius(const PlantModel& plant) {
  plant.validate();
  return spectral_radius(plant.closed_loop());
}

// Similarity-scaled infinity norm ||X||_* = ||T^-1 X T||_inf with T built
// from an eigen reduction of M0 (Schur form plus geometric diagonal scaling
// diag(1, gamma, gamma^2, ...) when the spectrum is defective or clustered).
// The construction guarantees ||M0||_* <= (1 + rho(M0))/2, and the same T
// tensored with itself measures the n^2 x n^2 Kronecker matrices, for which
// ||A (x) B||_* = ||A||_* ||B||_*.
class StarNorm {
 public:
  static StarNorm build(const PlantModel& plant) {
    plant.validate();
    const Mat m0 = plant.closed_loop();
    const int n = m0.rows;
    StarNorm out;
    out.rho0_ = spectral_radius(m0);
    if (!(out.rho0_ < 1.0))
      throw std::invalid_argument("star norm: unstable closed loop (rho = " +
                                  std::to_string(out.rho0_) + " >= 1)");
    const double target = 0.5 * (1.0 + out.rho0_);

    // Route 1: straight diagonalization when the spectrum cooperates.
    bool ok = false;
    const EigenDecomposition eig = eigen_decompose(m0);
    if (eig.residual < 1e-8) {
      const CluFactors f = clu_factor(eig.vectors);
      if (f.pivot_ratio > 1e-10) {
        CMat t = eig.vectors;
        CMat tinv = inverse(t);
        const double norm0 = inf_norm(tinv * CMat::from_real(m0) * t);
        if (norm0 <= target) {
          out.t_ = std::move(t);
          out.tinv_ = std::move(tinv);
          out.gamma_ = 1.0;
          out.diagonalized_ = true;
          ok = true;
        }
      }
    }

    // Route 2: complex-triangularized Schur form with geometric scaling.
    if (!ok) {
      const SchurDecomposition schur = real_schur(m0);
      CMat s = CMat::identity(n);
      for (int i = 0; i < n - 1; ++i) {
        if (schur.t(i + 1, i) == 0.0) continue;
        // 2x2 block with complex pair: local eigenvectors diagonalize it.
        const double a = schur.t(i, i), b = schur.t(i, i + 1);
        const double c = schur.t(i + 1, i), d = schur.t(i + 1, i + 1);
        const double mu = 0.5 * (a + d);
        const double disc = mu * mu - (a * d - b * c);
        const double nu = std::sqrt(std::max(-disc, 0.0));
        const Complex lam(mu, nu);
        Complex v0, v1;
        if (std::abs(b) >= std::abs(c)) {
          v0 = Complex(b, 0.0);
          v1 = lam - a;
        } else {
          v0 = lam - d;
          v1 = Complex(c, 0.0);
        }
        const double scale = std::max(std::abs(v0), std::abs(v1));
        v0 /= scale;
        v1 /= scale;
        s(i, i) = v0;
        s(i + 1, i) = v1;
        s(i, i + 1) = std::conj(v0);
        s(i + 1, i + 1) = std::conj(v1);
        ++i;
      }
      const CMat base = CMat::from_real(schur.q) * s;
      const CMat base_inv = inverse(base);
      const CMat tri = base_inv * CMat::from_real(m0) * base;

      double gamma = 1.0;
      int halvings = 0;
      for (; halvings < 400; ++halvings) {
        double norm0 = 0.0;
        for (int i = 0; i < n; ++i) {
          double row = 0.0;
          for (int j = i; j < n; ++j) row += std::abs(tri(i, j)) * std::pow(gamma, j - i);
          norm0 = std::max(norm0, row);
        }
        if (norm0 <= target) break;
        gamma *= 0.5;
      }
      if (halvings == 400) throw std::runtime_error("star norm: scaling failed to contract");
      CMat t = base;
      for (int i = 0; i < n; ++i) {
        const double scale = std::pow(gamma, i);
        for (int r = 0; r < n; ++r) t(r, i) *= scale;
      }
      out.t_ = t;
      out.tinv_ = inverse(t);
      out.gamma_ = gamma;
      out.diagonalized_ = false;
    }

    double tmax = 0.0, timax = 0.0;
    for (const Complex& v : out.t_.a) tmax = std::max(tmax, std::abs(v));
    for (const Complex& v : out.tinv_.a) timax = std::max(timax, std::abs(v));
    out.conditioning_ = tmax * timax;
    out.norm_m0_ = out.norm(m0);
    return out;
  }

  double norm(const Mat& x) const {
    if (x.rows != t_.rows || x.cols != t_.cols)
      throw std::invalid_argument("star norm: matrix size mismatch");
    return inf_norm(tinv_ * CMat::from_real(x) * t_);
  }

  // Norm of an n^2 x n^2 matrix under T (x) T.
  double norm_kron(const Mat& x) const {
    const int n2 = t_.rows * t_.rows;
    if (x.rows != n2 || x.cols != n2)
      throw std::invalid_argument("star norm: kron matrix size mismatch");
    return inf_norm(kron(tinv_, tinv_) * CMat::from_real(x) * kron(t_, t_));
  }

  double rho0() const { return rho0_; }
  double norm_m0() const { return norm_m0_; }
  double gamma() const { return gamma_; }
  bool diagonalized() const { return diagonalized_; }
  double conditioning() const { return conditioning_; }

 private:
  CMat t_, tinv_;
  double rho0_ = 0.0;
  double norm_m0_ = 0.0;
  double gamma_ = 1.0;
  bool diagonalized_ = false;
  double conditioning_ = 0.0;
};

enum class HVariant { paper, exact };
enum class CrossSign { positive, negative };

inline const char* to_string(HVariant v) { return v == HVariant::paper ? "paper" : "exact"; }
inline const char* to_string(CrossSign s) {
  return s == CrossSign::positive ? "positive" : "negative";
}

// Variance constant of the per-key relative error: h(p) = A * (p - p^2).
// The paper convention divides the combinatorial constant by E[beta^2]
// (which collapses to exactly 4 for every w_b); the exact convention
// multiplies by E[1/beta^2], the form the law-of-total-variance derivation
// actually produces.  Jensen makes the exact constant the larger one.
inline double stability_constant(int w_b, HVariant variant) {
  const double c = std::pow(4.0, w_b) + 3.0 * std::pow(2.0, w_b) + 2.0;
  const BetaMoments moments = beta_moments(w_b);
  if (variant == HVariant::paper) return c / (3.0 * moments.mean_square);
  return c * moments.mean_inverse_square / 3.0;
}

inline double h_of_p(double p, int w_b, HVariant variant) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("h_of_p: p outside [0,1]");
  return stability_constant(w_b, variant) * (p - p * p);
}

// Second-moment propagation matrix.
inline Mat build_m(const PlantModel& plant, double p, int w_b, HVariant variant,
                   CrossSign sign) {
  plant.validate();
  const Mat m0 = plant.closed_loop();
  const Mat m1 = plant.input_map();
  const double s = (sign == CrossSign::positive) ? 1.0 : -1.0;
  const double hbar = 4.0 * p * p + h_of_p(p, w_b, variant);
  return kron(m0, m0) + (s * 2.0 * p) * (kron(m1, m0) + kron(m0, m1)) + hbar * kron(m1, m1);
}

struct StabilityReport {
  double rho_closed = 0.0;
  double epsilon = 0.0;
  double star_norm_m0 = 0.0;
  double star_norm_m1 = 0.0;
  double a_const = 0.0;
  double p_star = 0.0;
  HVariant variant = HVariant::exact;
  bool diagonalized = false;
  double gamma = 1.0;
  double conditioning = 0.0;
};

// Flip-probability threshold p* = eps / max{16 |M1|^2, 16 |M1|, 4A |M1|^2},
// capped at 1.  A zero input map cannot destabilize, so it reports the cap.
inline StabilityReport p_star_report(const PlantModel& plant, int w_b, HVariant variant) {
  const StarNorm norm = StarNorm::build(plant);
  StabilityReport rep;
  rep.rho_closed = norm.rho0();
  rep.epsilon = 1.0 - rep.rho_closed;
  rep.star_norm_m0 = norm.norm_m0();
  rep.star_norm_m1 = norm.norm(plant.input_map());
  rep.a_const = stability_constant(w_b, variant);
  rep.variant = variant;
  rep.diagonalized = norm.diagonalized();
  rep.gamma = norm.gamma();
  rep.conditioning = norm.conditioning();
  const double m1 = rep.star_norm_m1;
  const double denom = std::max({16.0 * m1 * m1, 16.0 * m1, 4.0 * rep.a_const * m1 * m1});
  rep.p_star = (denom == 0.0) ? 1.0 : std::min(rep.epsilon / denom, 1.0);
  return rep;
}

inline double p_star(const PlantModel& plant, int w_b, HVariant variant) {
  return p_star_report(plant, w_b, variant).p_star;
}

struct RecursionResult {
  std::vector<double> norms;  // ||V(t)||_2 per step
  double trailing_slope = 0.0;
  bool converged = false;
  bool diverged = false;
};

// Iterates V(t+1) = M(p) V(t) and classifies the trend of log||V|| over the
// trailing quarter window (slope threshold +-1e-6).
inline RecursionResult mean_square_recursion(const PlantModel& plant, double p, int w_b,
                                             HVariant variant, CrossSign sign, int steps,
                                             std::vector<double> v0 = {}) {
  plant.validate();
  const int n = plant.dims();
  if (steps < 8) throw std::invalid_argument("mean_square_recursion: need at least 8 steps");
  if (v0.empty()) {
    v0.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v0[static_cast<std::size_t>(i) * n + i] = 1.0;  // vec(I)
  }
  if (static_cast<int>(v0.size()) != n * n)
    throw std::invalid_argument("mean_square_recursion: v0 must have n^2 entries");

  const Mat m = build_m(plant, p, w_b, variant, sign);
  RecursionResult out;
  out.norms.reserve(steps + 1);
  std::vector<double> v = std::move(v0);
  auto norm2 = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double e : x) s += e * e;
    return std::sqrt(s);
  };
  out.norms.push_back(norm2(v));
  for (int t = 0; t < steps; ++t) {
    v = m * v;
    out.norms.push_back(norm2(v));
  }

  // Least-squares slope of log||V|| on the trailing quarter.
  const int window = std::max(steps / 4, 4);
  const int start = static_cast<int>(out.norms.size()) - window;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < window; ++k) {
    const double x = k;
    const double y = std::log(std::max(out.norms[start + k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.trailing_slope = (window * sxy - sx * sy) / (window * sxx - sx * sx);
  out.converged = out.trailing_slope < -1e-6;
  out.diverged = out.trailing_slope > 1e-6;
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo oracle over the real pipeline (key flips through the channel
// simulator, exact encrypt/control/decrypt), used to pick the cross-term
// sign and to validate the analytic recursion.

struct MomentEstimate {
  Mat mean;    // E[x(t) x(t)^T]
  Mat stderr_; // standard error of each entry
};

inline std::vector<MomentEstimate> simulate_second_moments(
    const PlantModel& plant, const std::vector<double>& x0, double p, int w_b,
    std::span<const int> record_times, int trials, std::uint64_t seed) {
  plant.validate();
  const int n = plant.dims();
  if (static_cast<int>(x0.size()) != n)
    throw std::invalid_argument("simulate_second_moments: x0 dimension mismatch");
  int horizon = 0;
  for (int t : record_times) horizon = std::max(horizon, t);

  const BellStateSpec state = BellStateSpec::symmetric_with_error(p);
  std::vector<Mat> sum(record_times.size(), Mat(n, n));
  std::vector<Mat> sum_sq(record_times.size(), Mat(n, n));

  Rng master(seed);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = master.substream(trial);
    std::vector<double> x = x0;
    std::size_t next_record = 0;
    for (int t = 1; t <= horizon; ++t) {
      const QuantumKeyPair pair = sample_key_pair(state, n, w_b, t, rng);
      const KeyCoefficients se = plain_coefficients(pair, KeySide::sensor);
      const KeyCoefficients ac = plain_coefficients(pair, KeySide::actuator);
      const double u = decrypt(control(plant.K, encrypt(x, se)), ac);
      std::vector<double> next = plant.A * x;
      for (int i = 0; i < n; ++i) next[i] += plant.B[i] * u;
      x = std::move(next);
      while (next_record < record_times.size() && record_times[next_record] == t) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double v = x[i] * x[j];
            sum[next_record](i, j) += v;
            sum_sq[next_record](i, j) += v * v;
          }
        ++next_record;
      }
    }
  }

  std::vector<MomentEstimate> out;
  for (std::size_t k = 0; k < record_times.size(); ++k) {
    MomentEstimate est{Mat(n, n), Mat(n, n)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double m = sum[k](i, j) / trials;
        const double var = std::max(sum_sq[k](i, j) / trials - m * m, 0.0);
        est.mean(i, j) = m;
        est.stderr_(i, j) = std::sqrt(var / trials);
      }
    out.push_back(std::move(est));
  }
  return out;
}

struct SignSelection {
  CrossSign selected = CrossSign::negative;
  double max_z_negative = 0.0;
  double max_z_positive = 0.0;
};

// Runs the oracle and reports which cross-term sign the data supports.
inline SignSelection select_cross_sign(const PlantModel& plant, const std::vector<double>& x0,
                                       double p, int w_b, std::span<const int> record_times,
                                       int trials, std::uint64_t seed,
                                       HVariant variant = HVariant::exact) {
  const auto mc = simulate_second_moments(plant, x0, p, w_b, record_times, trials, seed);
  const int n = plant.dims();

  auto max_z_for = [&](CrossSign sign) {
    const Mat m = build_m(plant, p, w_b, variant, sign);
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j) * n + i] = x0[i] * x0[j];
    double worst = 0.0;
    int prev_t = 0;
    for (std::size_t k = 0; k < record_times.size(); ++k) {
      for (int t = prev_t; t < record_times[k]; ++t) v = m * v;
      prev_t = record_times[k];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double analytic = v[static_cast<std::size_t>(j) * n + i];
          const double se = std::max(mc[k].stderr_(i, j), 1e-300);
          worst = std::max(worst, std::abs(mc[k].mean(i, j) - analytic) / se);
        }
    }
    return worst;
  };

  SignSelection sel;
  sel.max_z_negative = max_z_for(CrossSign::negative);
  sel.max_z_positive = max_z_for(CrossSign::positive);
  sel.selected = sel.max_z_negative <= sel.max_z_positive ? CrossSign::negative
                                                          : CrossSign::positive;
  return sel;
}

}  // namespace qec

#endif  // QEC_STABILITY_HPP
