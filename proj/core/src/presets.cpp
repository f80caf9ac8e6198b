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

#include "fsl/presets.hpp"

#include <ostream>

#include "fsl/error.hpp"

namespace fsl {

namespace fs = std::filesystem;

Overrides desk_scale_overrides() {
  return {
      {"data.source", "synthetic"},
      {"synth.classes", "6"},
      {"synth.channels", "9"},
      {"synth.timesteps", "32"},
      {"synth.train_per_class", "60"},
      {"synth.test_per_class", "100"},
      {"synth.noise_std", "1.0"},
      {"model.hidden", "32"},
      {"model.dense_units", "32"},
      {"eta_c", "0.3"},
      {"eta_s", "0.3"},
  };
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"fig2-dp-sweep",
       "FSL without noise and at epsilon 80, 50, 40",
       {{"mode", "fsl"}},
       {{"no-dp", {{"dp.enabled", "false"}}},
        {"eps80", {{"dp.enabled", "true"}, {"dp.epsilon", "80"}}},
        {"eps50", {{"dp.enabled", "true"}, {"dp.epsilon", "50"}}},
        {"eps40", {{"dp.enabled", "true"}, {"dp.epsilon", "40"}}}}},
      {"fig3-sensor-ablation",
       "FSL at epsilon 80 with both sensors, accelerometer only, gyroscope only",
       {{"mode", "fsl"}, {"dp.enabled", "true"}, {"dp.epsilon", "80"}},
       {{"both", {{"data.sensors", "both"}}},
        {"accel", {{"data.sensors", "accel"}}},
        {"gyro", {{"data.sensors", "gyro"}}}}},
      {"fig4-fsl-vs-fl",
       "FSL against FedAvg, without noise and at epsilon 40",
       {},
       {{"fsl-no-dp", {{"mode", "fsl"}, {"dp.enabled", "false"}}},
        {"fl-no-dp", {{"mode", "fl"}, {"dp.enabled", "false"}}},
        {"fsl-eps40", {{"mode", "fsl"}, {"dp.enabled", "true"}, {"dp.epsilon", "40"}}},
        {"fl-eps40", {{"mode", "fl"}, {"dp.enabled", "true"}, {"dp.epsilon", "40"}}}}},
      {"fig5-comm-time",
       "Per-round simulated and wall-clock time of FSL and FL over 100 rounds",
       {{"rounds", "100"}, {"dp.enabled", "false"}},
       {{"fsl", {{"mode", "fsl"}}}, {"fl", {{"mode", "fl"}}}}},
  };
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  std::string known;
  for (const Preset& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

ExperimentConfig preset_config(const Preset& preset, const PresetSeries& series, const PresetOptions& opts) {
  Overrides all;
  const bool have_data = !opts.data_path.empty() && fs::exists(opts.data_path / "train" / "y_train.txt");
  if (have_data) {
    all.push_back({"data.source", "uci-har"});
    all.push_back({"data.path", opts.data_path.string()});
  } else if (opts.allow_synthetic_fallback) {
    all = desk_scale_overrides();
  } else {
    throw ConfigError("dataset path '" + opts.data_path.string() + "' does not contain the UCI HAR layout");
  }
  all.insert(all.end(), preset.base.begin(), preset.base.end());
  all.insert(all.end(), series.overrides.begin(), series.overrides.end());
  all.insert(all.end(), opts.extra.begin(), opts.extra.end());
  all.push_back({"out", (opts.out_dir / preset.name / series.name).string()});
  return parse_config_text("", preset.name + "/" + series.name, all);
}

std::vector<RoundRecord> run_experiment(const ExperimentConfig& cfg, const RoundCallback& on_round) {
  ExperimentData data = load_experiment_data(cfg);
  TrainOptions opts = to_train_options(cfg, data.train.channels(), data.train.num_classes);
  return train(opts, data.train, data.test, on_round);
}

std::vector<SeriesResult> run_preset(const std::string& name, const PresetOptions& opts) {
  const Preset& preset = find_preset(name);
  const bool have_data = !opts.data_path.empty() && fs::exists(opts.data_path / "train" / "y_train.txt");
  if (!have_data && opts.log != nullptr) {
    *opts.log << "warning: UCI HAR data not found at '" << opts.data_path.string()
              << "'; running the synthetic desk-scale stand-in\n";
  }
  std::vector<SeriesResult> results;
  for (const PresetSeries& s : preset.series) {
    SeriesResult r;
    r.name = s.name;
    r.config = preset_config(preset, s, opts);
    if (opts.log != nullptr) *opts.log << "[" << preset.name << "] " << s.name << " ..." << std::flush;
    r.records = run_experiment(r.config);
    r.files = emit_metrics(r.records, r.config, r.config.out, s.name);
    if (opts.log != nullptr) {
      const double acc = r.records.empty() ? 0.0 : r.records.back().val_accuracy;
      *opts.log << " final val_acc " << acc << "\n";
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace fsl
