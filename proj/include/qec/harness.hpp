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

#ifndef QEC_HARNESS_HPP
#define QEC_HARNESS_HPP

// Scenario configuration (JSON) and the closed-loop simulation driver.
//
// Every run is a pure function of (config, master seed).  Trial k draws its
// randomness from stream derive(seed, k) with fixed substreams (0 sensor
// dither, 1 controller dither, 2 channel), so enabling or disabling a stage
// never shifts another stage's draws, and trials aggregate by pairwise
// summation so the result does not depend on evaluation order.  Every hop
// between roles passes through the byte-level wire format.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qec/qec_core.hpp"
#include "qec/qec_quantized.hpp"
#include "qec/quantum_channel.hpp"
#include "qec/stability.hpp"
#include "qec/stats.hpp"
#include "qec/wire.hpp"

namespace qec {

enum class Realization { exact, quantized };

struct ScenarioConfig {
  std::string name = "scenario";
  PlantModel plant;
  Realization realization = Realization::exact;
  std::vector<double> x0;
  int horizon = 600;
  int trials = 200;
  std::uint64_t seed = 0;
  int w_b = 4;
  std::string output_dir;  // default CSV destination; CLI --out overrides

  // Bell state: either a plain mismatch probability (symmetric state) or
  // four complex amplitudes.
  std::optional<double> bell_p;
  std::optional<std::array<std::complex<double>, 4>> bell_amplitudes;

  // Quantized realization parameters.
  int w = 10;
  double alpha = 0.9;
  std::vector<double> xbar;
  std::vector<double> delta;  // empty -> defaults derived from gains

  BellStateSpec bell_state() const {
    if (bell_amplitudes) {
      const auto& a = *bell_amplitudes;
      return BellStateSpec(a[0], a[1], a[2], a[3]);
    }
    return BellStateSpec::symmetric_with_error(bell_p.value_or(0.0));
  }

  QuantizedScenario quantized_scenario() const {
    QuantizedScenario scen;
    scen.w = w;
    scen.w_b = w_b;
    scen.alpha = alpha;
    scen.gains = plant.K;
    scen.xbar = xbar;
    scen.delta = delta.empty() ? QuantizedScenario::default_deltas(plant.K, w) : delta;
    return scen;
  }

  void validate() const {
    plant.validate();
    if (static_cast<int>(x0.size()) != plant.dims())
      throw std::invalid_argument("config: x0 dimension mismatch");
    if (horizon < 1) throw std::invalid_argument("config: violates horizon >= 1");
    if (trials < 1) throw std::invalid_argument("config: violates trials >= 1");
    if (w_b < 1 || w_b > 24) throw std::invalid_argument("config: violates 1 <= w_b <= 24");
    if (bell_p && (*bell_p < 0.0 || *bell_p > 1.0))
      throw std::invalid_argument("config: violates bell p in [0, 1]");
    bell_state();  // normalization check for amplitude form
    if (realization == Realization::quantized) quantized_scenario().validate();
  }

  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig from_json_file(const std::string& path);
};

inline ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  try {
    cfg.name = j.value("name", std::string("scenario"));
    const auto& plant = j.at("plant");
    const auto& rows = plant.at("A");
    const int n = static_cast<int>(rows.size());
    cfg.plant.A = Mat(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw std::invalid_argument("config: A must be square (row " + std::to_string(i) + ")");
      for (int k = 0; k < n; ++k) cfg.plant.A(i, k) = rows[i][k].get<double>();
    }
    cfg.plant.B = plant.at("B").get<std::vector<double>>();
    cfg.plant.K = plant.at("K").get<std::vector<double>>();

    const std::string realization = j.value("realization", std::string("exact"));
    if (realization == "exact")
      cfg.realization = Realization::exact;
    else if (realization == "quantized")
      cfg.realization = Realization::quantized;
    else
      throw std::invalid_argument("config: realization must be 'exact' or 'quantized'");

    cfg.x0 = j.at("x0").get<std::vector<double>>();
    cfg.horizon = j.value("horizon", 600);
    cfg.trials = j.value("trials", 200);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.w_b = j.value("w_b", 4);
    cfg.output_dir = j.value("out", std::string());

    if (j.contains("bell")) {
      const auto& bell = j.at("bell");
      if (bell.contains("p")) cfg.bell_p = bell.at("p").get<double>();
      if (bell.contains("amplitudes")) {
        const auto& amp = bell.at("amplitudes");
        auto read = [&](const char* key) {
          const auto& pair = amp.at(key);
          return std::complex<double>(pair.at(0).get<double>(), pair.at(1).get<double>());
        };
        cfg.bell_amplitudes = {read("a"), read("b"), read("c"), read("d")};
      }
    }

    if (j.contains("quantized")) {
      const auto& q = j.at("quantized");
      cfg.w = q.value("w", 10);
      cfg.alpha = q.value("alpha", 0.9);
      if (q.contains("xbar")) cfg.xbar = q.at("xbar").get<std::vector<double>>();
      if (q.contains("delta") && q.at("delta").is_array())
        cfg.delta = q.at("delta").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed JSON structure: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: JSON parse failure in '" + path + "': " + e.what());
  }
  return from_json(j);
}

struct RunReport {
  int horizon = 0;
  int trials = 0;
  std::vector<double> mean_err_sq;       // per step, mean over trials of (u - Kx)^2
  std::vector<double> mean_state_norm2;  // per step, mean over trials of ||x||^2
  double trailing_slope = 0.0;
  bool converged = false;
  bool diverged = false;
};

namespace detail {

// One closed-loop trial; fills per-step (u - Kx)^2 and ||x||^2.
inline void run_trial(const ScenarioConfig& cfg, const BellStateSpec& bell, Rng trial_rng,
                      std::vector<double>& err_sq, std::vector<double>& state_norm2) {
  const int n = cfg.plant.dims();
  Rng sensor_rng = trial_rng.substream(0);
  Rng controller_rng = trial_rng.substream(1);
  Rng channel_rng = trial_rng.substream(2);

  const QuantizedScenario scen =
      cfg.realization == Realization::quantized ? cfg.quantized_scenario() : QuantizedScenario{};

  std::vector<double> x = cfg.x0;
  for (int t = 0; t < cfg.horizon; ++t) {
    try {
    const QuantumKeyPair pair = sample_key_pair(bell, n, cfg.w_b, t, channel_rng);
    double kx = 0.0;
    for (int i = 0; i < n; ++i) kx += cfg.plant.K[i] * x[i];

    double u = 0.0;
    if (cfg.realization == Realization::exact) {
      const KeyCoefficients se = plain_coefficients(pair, KeySide::sensor);
      const KeyCoefficients ac = plain_coefficients(pair, KeySide::actuator);
      RealFrame state_frame{static_cast<std::uint64_t>(t), FrameKind::state,
                            encrypt(x, se).values};
      const DecodedFrame at_controller = decode_frame(encode_frame(state_frame));
      RealCiphertext ct;
      ct.t = at_controller.real.t;
      ct.values = at_controller.real.values;
      RealFrame input_frame{static_cast<std::uint64_t>(t), FrameKind::input,
                            control(cfg.plant.K, ct).values};
      const DecodedFrame at_actuator = decode_frame(encode_frame(input_frame));
      RealCiphertext ct_u;
      ct_u.t = at_actuator.real.t;
      ct_u.values = at_actuator.real.values;
      u = decrypt(ct_u, ac);
    } else {
      const KeyCoefficients se =
          quantized_coefficients(pair, KeySide::sensor, scen.alpha, scen.xbar);
      const KeyCoefficients ac =
          quantized_coefficients(pair, KeySide::actuator, scen.alpha, scen.xbar);
      QuantCipherFrame sf = encrypt_q(x, se, scen, sensor_rng);
      sf.t = static_cast<std::uint64_t>(t);
      const DecodedFrame at_controller = decode_frame(encode_frame(sf));
      QuantCipherFrame cf = control_q(cfg.plant.K, at_controller.quant, scen, controller_rng);
      const DecodedFrame at_actuator = decode_frame(encode_frame(cf));
      u = decrypt_q(at_actuator.quant, ac, scen);
    }

    const double err = u - kx;
    err_sq[t] = err * err;
    std::vector<double> next = cfg.plant.A * x;
    for (int i = 0; i < n; ++i) next[i] += cfg.plant.B[i] * u;
    x = std::move(next);
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    state_norm2[t] = norm2;
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(t) + ": " + e.what());
    }
  }
}

}  // namespace detail

inline RunReport simulate_closed_loop(const ScenarioConfig& cfg) {
  cfg.validate();
  const BellStateSpec bell = cfg.bell_state();

  RunReport report;
  report.horizon = cfg.horizon;
  report.trials = cfg.trials;

  // Per-step columns across trials, merged by pairwise summation.
  std::vector<std::vector<double>> err_cols(cfg.horizon, std::vector<double>(cfg.trials));
  std::vector<std::vector<double>> norm_cols(cfg.horizon, std::vector<double>(cfg.trials));
  std::vector<double> err_sq(cfg.horizon), state_norm2(cfg.horizon);
  for (int k = 0; k < cfg.trials; ++k) {
    try {
      detail::run_trial(cfg, bell, Rng(derive_seed(cfg.seed, k)), err_sq, state_norm2);
    } catch (const std::exception& e) {
      throw std::runtime_error("simulate: trial " + std::to_string(k) + ": " + e.what());
    }
    for (int t = 0; t < cfg.horizon; ++t) {
      err_cols[t][k] = err_sq[t];
      norm_cols[t][k] = state_norm2[t];
    }
  }
  report.mean_err_sq.resize(cfg.horizon);
  report.mean_state_norm2.resize(cfg.horizon);
  for (int t = 0; t < cfg.horizon; ++t) {
    report.mean_err_sq[t] = mean(err_cols[t]);
    report.mean_state_norm2[t] = mean(norm_cols[t]);
  }

  // Convergence trend of the state second moment: trailing quarter for long
  // runs, the whole run when it is too short for transients to matter (an
  // oscillating mode can alias a tiny window).
  const int window = std::max(cfg.horizon / 4, std::min(cfg.horizon, 16));
  const int start = cfg.horizon - window;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < window; ++k) {
    const double y = std::log(std::max(report.mean_state_norm2[start + k], 1e-300));
    sx += k;
    sy += y;
    sxx += static_cast<double>(k) * k;
    sxy += k * y;
  }
  const double denom = window * sxx - sx * sx;
  report.trailing_slope = denom != 0.0 ? (window * sxy - sx * sy) / denom : 0.0;
  // Geometric trends move whole decades per step; a Monte-Carlo noise floor
  // (quantization plus key flips) wobbles well inside this dead band and is
  // reported as flat.
  report.converged = report.trailing_slope < -1e-2;
  report.diverged = report.trailing_slope > 1e-2;
  return report;
}

// Shortest round-trip decimal formatting, used for all CSV output.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string run_report_csv(const RunReport& report) {
  std::string out = "t,mean_err_sq,mean_state_norm2\n";
  for (int t = 0; t < report.horizon; ++t) {
    out += std::to_string(t);
    out += ',';
    out += format_double(report.mean_err_sq[t]);
    out += ',';
    out += format_double(report.mean_state_norm2[t]);
    out += '\n';
  }
  return out;
}

}  // namespace qec

#endif  // QEC_HARNESS_HPP
