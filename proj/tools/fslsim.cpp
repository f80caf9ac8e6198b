// Copyright 2026 The fslsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "checks.hpp"
#include "fsl/config.hpp"
#include "fsl/error.hpp"
#include "fsl/metrics.hpp"
#include "fsl/presets.hpp"

namespace {

using fsl::Overrides;

void add_set_pairs(const std::vector<std::string>& sets, Overrides& out) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw fsl::ConfigError("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
}

void progress(const fsl::RoundRecord& r, std::size_t total) {
  std::fprintf(stderr, "round %zu/%zu  train_loss %.4f  val_loss %.4f  val_acc %.4f  sim %.3fs\n", r.round, total,
               r.train_loss, r.val_loss, r.val_accuracy, r.sim_time_s);
}

struct TrainArgs {
  std::string config;
  std::string mode, sensors, out;
  std::optional<std::size_t> rounds, clients, batch;
  std::optional<double> dp_epsilon, dp_H, dp_z, dp_clip;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  bool quiet = false;
  std::vector<std::string> sets;
};

int run_train(const TrainArgs& a) {
  Overrides ov;
  if (!a.mode.empty()) ov.emplace_back("mode", a.mode);
  if (a.rounds) ov.emplace_back("rounds", std::to_string(*a.rounds));
  if (a.clients) ov.emplace_back("clients", std::to_string(*a.clients));
  if (a.batch) ov.emplace_back("batch", std::to_string(*a.batch));
  if (a.dp_epsilon) {
    ov.emplace_back("dp.enabled", "true");
    ov.emplace_back("dp.epsilon", CLI::detail::to_string(*a.dp_epsilon));
  }
  if (a.dp_H) ov.emplace_back("dp.H", CLI::detail::to_string(*a.dp_H));
  if (a.dp_z) ov.emplace_back("dp.z", CLI::detail::to_string(*a.dp_z));
  if (a.dp_clip) ov.emplace_back("dp.clip", CLI::detail::to_string(*a.dp_clip));
  if (!a.sensors.empty()) ov.emplace_back("data.sensors", a.sensors);
  if (a.seed) ov.emplace_back("seed", std::to_string(*a.seed));
  if (a.deterministic) ov.emplace_back("deterministic", "true");
  if (!a.out.empty()) ov.emplace_back("out", a.out);
  add_set_pairs(a.sets, ov);

  const fsl::ExperimentConfig cfg = fsl::parse_config(a.config, ov);
  const std::size_t total = cfg.rounds;
  fsl::RoundCallback cb;
  if (!a.quiet) cb = [total](const fsl::RoundRecord& r) { progress(r, total); };
  const std::vector<fsl::RoundRecord> records = fsl::run_experiment(cfg, cb);
  if (records.size() != cfg.rounds) {
    std::cerr << "error: completed " << records.size() << " of " << cfg.rounds << " rounds\n";
    return 1;
  }
  const fsl::EmittedFiles files = fsl::emit_metrics(records, cfg, cfg.out);
  std::cout << files.metrics.string() << "\n" << files.manifest.string() << "\n";
  return 0;
}

int run_preset(const std::string& name, const std::string& data, const std::string& out, bool no_fallback,
               std::optional<std::size_t> rounds, const std::vector<std::string>& sets) {
  fsl::PresetOptions opts;
  opts.data_path = data;
  opts.out_dir = out;
  opts.allow_synthetic_fallback = !no_fallback;
  opts.log = &std::cerr;
  if (rounds) opts.extra.emplace_back("rounds", std::to_string(*rounds));
  add_set_pairs(sets, opts.extra);
  const auto results = fsl::run_preset(name, opts);
  for (const auto& r : results) std::cout << r.files.metrics.string() << "\n";
  return 0;
}

int run_keys() {
  const fsl::ExperimentConfig defaults;
  const auto values = fsl::resolved_values(defaults);
  for (const fsl::ConfigKey& k : fsl::config_keys()) {
    const auto it = values.find(k.key);
    std::cout << k.key << " = " << (it == values.end() ? "" : it->second) << "    # " << k.help << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated split learning simulator for human activity recognition"};
  app.require_subcommand(1);

  TrainArgs ta;
  CLI::App* train = app.add_subcommand("train", "run one experiment and write metrics.csv + manifest.json");
  train->add_option("--config", ta.config, "key = value file or a manifest.json from an earlier run");
  train->add_option("--mode", ta.mode, "fsl | fl | centralized-oracle");
  train->add_option("--rounds", ta.rounds, "global rounds T");
  train->add_option("--clients", ta.clients, "number of clients N");
  train->add_option("--batch", ta.batch, "mini-batch size b per client");
  train->add_option("--dp-epsilon", ta.dp_epsilon, "privacy budget; turns noise on");
  train->add_option("--dp-H", ta.dp_H, "noise calibration constant H");
  train->add_option("--dp-z", ta.dp_z, "noise calibration floor z");
  train->add_option("--dp-clip", ta.dp_clip, "per-row L2 bound applied before the noise");
  train->add_option("--sensors", ta.sensors, "both | accel | gyro");
  train->add_option("--seed", ta.seed, "root seed");
  train->add_flag("--deterministic", ta.deterministic, "sequential clients, zeroed wall-time column");
  train->add_option("--out", ta.out, "output directory");
  train->add_option("--set", ta.sets, "extra key=value override (repeatable)");
  train->add_flag("-q,--quiet", ta.quiet, "no per-round progress");

  std::string preset_name, preset_data, preset_out = "runs";
  bool no_fallback = false;
  std::optional<std::size_t> preset_rounds;
  std::vector<std::string> preset_sets;
  CLI::App* preset = app.add_subcommand("preset", "run a named experiment grid");
  preset->add_option("name", preset_name, "fig2-dp-sweep | fig3-sensor-ablation | fig4-fsl-vs-fl | fig5-comm-time")
      ->required();
  preset->add_option("--data", preset_data, "UCI HAR Dataset root");
  preset->add_option("--out", preset_out, "output root");
  preset->add_option("--rounds", preset_rounds, "override the round count");
  preset->add_option("--set", preset_sets, "extra key=value override (repeatable)");
  preset->add_flag("--no-fallback", no_fallback, "fail instead of using synthetic data");

  CLI::App* selftest = app.add_subcommand("selftest", "run the exact oracle checks");
  CLI::App* keys = app.add_subcommand("keys", "list config keys with their defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(ta);
    if (*preset) return run_preset(preset_name, preset_data, preset_out, no_fallback, preset_rounds, preset_sets);
    if (*keys) return run_keys();
    if (*selftest) {
      const auto scratch = std::filesystem::temp_directory_path() / "fslsim-selftest";
      return fsl::checks::report(fsl::checks::run_exact(scratch), std::cout) ? 0 : 1;
    }
  } catch (const fsl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
