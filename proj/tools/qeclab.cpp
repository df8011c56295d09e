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

// qeclab: scenario runner for the encrypted-control laboratory.
//
// Subcommands: simulate, pstar, privacy, quantize-test, attack, bench,
// keygen-sim.  Every run is deterministic in (config, seed).  Exit codes:
// 0 success, 2 configuration validation failure, 1 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qec/attacks_bench.hpp"
#include "qec/harness.hpp"
#include "qec/privacy.hpp"
#include "qec/stability.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool csv_to_stdout = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON scenario file")->required();
  auto* seed = cmd->add_option("--seed", "Override the config master seed");
  seed->each([&opts](const std::string& s) { opts.seed = std::stoull(s); });
  auto* out = cmd->add_option("--out", "Directory for CSV output files");
  out->each([&opts](const std::string& s) { opts.out_dir = s; });
  cmd->add_flag("--csv", opts.csv_to_stdout, "Also print CSV to stdout");
}

qec::ScenarioConfig load_config(const CommonOptions& opts) {
  qec::ScenarioConfig cfg = qec::ScenarioConfig::from_json_file(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

void deliver_csv(const CommonOptions& opts, const std::string& config_out,
                 const std::string& file_stem, const std::string& csv, bool stdout_default) {
  std::optional<std::string> out_dir = opts.out_dir;
  if (!out_dir && !config_out.empty()) out_dir = config_out;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const std::string path = *out_dir + "/" + file_stem + ".csv";
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << csv;
    std::cout << "wrote " << path << "\n";
  }
  if (opts.csv_to_stdout || (stdout_default && !out_dir)) std::cout << csv;
}

int run_simulate(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  const auto report = qec::simulate_closed_loop(cfg);
  deliver_csv(opts, cfg.output_dir, cfg.name + "_run", qec::run_report_csv(report), false);
  std::cout << "simulate: " << cfg.name << " trials=" << report.trials
            << " horizon=" << report.horizon
            << " final_mean_err_sq=" << qec::format_double(report.mean_err_sq.back())
            << " final_mean_state_norm2="
            << qec::format_double(report.mean_state_norm2.back())
            << " trend=" << (report.converged ? "converged"
                                              : (report.diverged ? "diverged" : "flat"))
            << "\n";
  return 0;
}

int run_pstar(const CommonOptions& opts, const std::string& variant_name) {
  const auto cfg = load_config(opts);
  const qec::HVariant variant =
      variant_name == "paper" ? qec::HVariant::paper : qec::HVariant::exact;
  const auto rep = qec::p_star_report(cfg.plant, cfg.w_b, variant);
  std::string csv =
      "plant_id,rho_closed,epsilon,m1_star_norm,a_const,p_star,variant,sign_convention\n";
  csv += cfg.name + "," + qec::format_double(rep.rho_closed) + "," +
         qec::format_double(rep.epsilon) + "," + qec::format_double(rep.star_norm_m1) + "," +
         qec::format_double(rep.a_const) + "," + qec::format_double(rep.p_star) + "," +
         qec::to_string(rep.variant) + "," + qec::to_string(qec::CrossSign::negative) + "\n";
  deliver_csv(opts, cfg.output_dir, cfg.name + "_pstar", csv, true);
  return 0;
}

int run_privacy(const CommonOptions& opts, double zeta, int pairs) {
  auto cfg = load_config(opts);
  cfg.realization = qec::Realization::quantized;
  cfg.validate();
  const auto scen = cfg.quantized_scenario();
  const double xbar_agg =
      qec::aggregate_xbar(scen.xbar, qec::XbarAggregation::min_conservative);

  const double l1a = std::log1p(scen.alpha);
  if (zeta <= 0.0)  // default: half the largest budget the hypothesis admits
    zeta = 0.5 * std::ldexp(1.0, -(scen.w - 1)) * xbar_agg / ((1.0 + scen.alpha) * l1a * l1a);
  const double sensitivity = zeta * (1.0 + scen.alpha) * l1a * l1a / xbar_agg;
  const bool feasible = sensitivity <= std::ldexp(1.0, -(scen.w - 1));

  std::string csv = "zeta,alpha,xbar_agg,w,delta,measured_max_gap,feasible\n";
  double max_gap = 0.0;
  double delta = std::ldexp(sensitivity, scen.w - 1);
  if (feasible) {
    qec::Rng rng(cfg.seed);
    for (int k = 0; k < pairs; ++k) {
      const int dim = static_cast<int>(rng.below(scen.dims()));
      const double floor_mag = scen.xbar[dim] / l1a;
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double beta =
          sign * (floor_mag + 1.0 + rng.uniform(0.0, std::pow(2.0, scen.w_b - 1) - 1.0));
      const double beta_prime = beta + sign * rng.uniform(0.0, zeta);
      const double x = rng.uniform(-0.999 * scen.xbar[dim], 0.999 * scen.xbar[dim]);
      const auto res = qec::verify_dp_exact(x, beta, beta_prime, scen, dim);
      max_gap = std::max(max_gap, res.tv_gap);
      delta = std::max(delta, res.delta);
    }
  }
  csv += qec::format_double(zeta) + "," + qec::format_double(scen.alpha) + "," +
         qec::format_double(xbar_agg) + "," + std::to_string(scen.w) + "," +
         qec::format_double(delta) + "," +
         (feasible ? qec::format_double(max_gap) : std::string("nan")) + "," +
         (feasible ? "1" : "0") + "\n";
  deliver_csv(opts, cfg.output_dir, cfg.name + "_privacy", csv, true);
  return 0;
}

int run_quantize_test(const CommonOptions& opts) {
  const auto cfg = load_config(opts);
  std::string csv = "w,grid_points,max_mean_abs_err,max_variance,variance_bound,mc_mean_err\n";
  qec::Rng rng(cfg.seed);
  for (int w : {6, 8, 10, 12}) {
    const double hi = qec::g_warp_inverse(qec::top_of_grid(w));
    double max_mean_err = 0.0, max_var = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = 0.5 + (hi - 0.5) * k / 100.0;
      const auto atoms = qec::atom_distribution(v, w);
      max_mean_err = std::max(max_mean_err,
                              std::abs(qec::atom_mean(atoms) - qec::g_warp(v)));
      max_var = std::max(max_var, qec::atom_variance(atoms));
    }
    const double v_probe = 0.5 + (hi - 0.5) * 0.37;
    double mc = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) mc += qec::quantize(v_probe, w, rng).val();
    csv += std::to_string(w) + ",101," + qec::format_double(max_mean_err) + "," +
           qec::format_double(max_var) + "," + qec::format_double(std::ldexp(1.0, -2 * w)) +
           "," + qec::format_double(std::abs(mc / draws - qec::g_warp(v_probe))) + "\n";
  }
  deliver_csv(opts, cfg.output_dir, cfg.name + "_quantize", csv, true);
  return 0;
}

int run_attack(const CommonOptions& opts, int horizon, double noise_mag) {
  const auto cfg = load_config(opts);
  const std::vector<double> x0 = cfg.x0;
  const auto plain = qec::plain_trajectory(cfg.plant, x0, horizon);
  qec::Rng rng(cfg.seed);

  std::string csv = "noise,scheme,relative_error,rank_deficient\n";
  for (auto kind : {qec::NoiseKind::none, qec::NoiseKind::gaussian, qec::NoiseKind::uniform,
                    qec::NoiseKind::impulse}) {
    const auto noisy_plain = qec::inject_noise(plain, kind, noise_mag, rng);
    const auto cipher = qec::ciphertext_trajectory(cfg.plant, x0, horizon, cfg.w_b, rng);
    const auto noisy_cipher = qec::inject_noise(cipher, kind, noise_mag, rng);
    for (const auto& [scheme, observed] :
         {std::pair<std::string, const qec::Trajectory&>{"no_enc", noisy_plain},
          std::pair<std::string, const qec::Trajectory&>{"qec", noisy_cipher}}) {
      const auto res = qec::sysid_attack(observed, plain, x0);
      csv += std::string(qec::to_string(kind)) + "," + scheme + "," +
             qec::format_double(res.relative_error) + "," +
             (res.rank_deficient ? "1" : "0") + "\n";
    }
  }
  deliver_csv(opts, cfg.output_dir, cfg.name + "_attack", csv, true);
  return 0;
}

int run_bench(const CommonOptions& opts, int steps) {
  const auto cfg = load_config(opts);
  const std::vector<std::string> schemes = {"qec", "qec_quantized", "toy_symmetric", "toy_rsa",
                                            "toy_paillier"};
  const auto results = qec::bench_schemes(cfg.plant, schemes, steps, cfg.seed);
  std::string csv = "scheme,sensor_s,controller_s,actuator_s,total_s\n";
  for (const auto& r : results)
    csv += r.scheme + "," + qec::format_double(r.sensor_s) + "," +
           qec::format_double(r.controller_s) + "," + qec::format_double(r.actuator_s) + "," +
           qec::format_double(r.total_s) + "\n";
  deliver_csv(opts, cfg.output_dir, cfg.name + "_bench", csv, true);
  return 0;
}

int run_keygen_sim(const CommonOptions& opts, int steps) {
  const auto cfg = load_config(opts);
  const auto bell = cfg.bell_state();
  qec::Rng rng(cfg.seed);
  std::vector<qec::QuantumKeyPair> pairs;
  for (int t = 0; t < steps; ++t) {
    pairs.push_back(qec::sample_key_pair(bell, cfg.plant.dims(), cfg.w_b, t, rng));
    std::cout << qec::dump_key_pair(pairs.back()) << "\n";
  }
  // Larger sample for the statistics block.
  std::vector<qec::QuantumKeyPair> sample;
  const int reps = std::max(1000 / (cfg.plant.dims() * cfg.w_b) + 1, 100);
  for (int t = 0; t < reps; ++t)
    sample.push_back(qec::sample_key_pair(bell, cfg.plant.dims(), cfg.w_b, t, rng));
  const auto stats = qec::empirical_bit_statistics(sample);
  std::cout << "stats: bits=" << stats.total_bits
            << " sensor_one_freq=" << qec::format_double(stats.sensor_one_frequency)
            << " flip_rate=" << qec::format_double(stats.flip_rate)
            << " flip_independence_p=" << qec::format_double(stats.flip_independence_pvalue)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qeclab: encrypted-control simulation laboratory"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string variant = "exact";
  double zeta = -1.0;  // <= 0 derives a feasible default from the scenario
  int pairs = 1000;
  int attack_horizon = 16;
  double noise_mag = 0.01;
  int bench_steps = 2000;
  int keygen_steps = 8;

  auto* simulate = app.add_subcommand("simulate", "Run the closed loop and emit per-step CSV");
  add_common(simulate, opts);

  auto* pstar = app.add_subcommand("pstar", "Stability threshold report for the config plant");
  add_common(pstar, opts);
  pstar->add_option("--variant", variant, "Variance constant convention: exact|paper");

  auto* privacy = app.add_subcommand("privacy", "Exact privacy verification over random pairs");
  add_common(privacy, opts);
  privacy->add_option("--zeta", zeta, "Adjacency budget (default: half the feasibility cap)");
  privacy->add_option("--pairs", pairs, "Number of random adjacent pairs");

  auto* quant = app.add_subcommand("quantize-test", "Quantizer law checks over a value grid");
  add_common(quant, opts);

  auto* attack = app.add_subcommand("attack", "System-identification eavesdropper comparison");
  add_common(attack, opts);
  attack->add_option("--horizon", attack_horizon, "Trajectory length");
  attack->add_option("--noise-mag", noise_mag, "Additive noise magnitude");

  auto* bench = app.add_subcommand("bench", "Per-role timing across encryption schemes");
  add_common(bench, opts);
  bench->add_option("--steps", bench_steps, "Steps per scheme");

  auto* keygen = app.add_subcommand("keygen-sim", "Sample key pairs and print the dump format");
  add_common(keygen, opts);
  keygen->add_option("--steps", keygen_steps, "Number of key pairs to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(opts);
    if (pstar->parsed()) return run_pstar(opts, variant);
    if (privacy->parsed()) return run_privacy(opts, zeta, pairs);
    if (quant->parsed()) return run_quantize_test(opts);
    if (attack->parsed()) return run_attack(opts, attack_horizon, noise_mag);
    if (bench->parsed()) return run_bench(opts, bench_steps);
    if (keygen->parsed()) return run_keygen_sim(opts, keygen_steps);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
