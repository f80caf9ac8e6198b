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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fsl/config.hpp"
#include "fsl/federation.hpp"
#include "fsl/metrics.hpp"

namespace fsl {

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct PresetSeries {
  std::string name;
  Overrides overrides;
};

/// A named experiment grid: series that differ only in their overrides.
struct Preset {
  std::string name;
  std::string description;
  Overrides base;
  std::vector<PresetSeries> series;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

/// Synthetic stand-in used when the UCI HAR files are not available: a small
/// LSTM on short windows, sized to finish in minutes on one core.
Overrides desk_scale_overrides();

struct PresetOptions {
  std::filesystem::path data_path;  // UCI HAR root; empty or missing falls back to synthetic
  std::filesystem::path out_dir;
  bool allow_synthetic_fallback = true;
  Overrides extra;  // applied after the preset's own settings
  std::ostream* log = nullptr;
};

struct SeriesResult {
  std::string name;
  ExperimentConfig config;
  std::vector<RoundRecord> records;
  EmittedFiles files;
};

/// Resolved config of one preset series (without running it).
ExperimentConfig preset_config(const Preset& preset, const PresetSeries& series, const PresetOptions& opts);

/// Runs every series; writes `<out>/<preset>/<series>/{metrics.csv,manifest.json}`.
std::vector<SeriesResult> run_preset(const std::string& name, const PresetOptions& opts);

/// Loads data for `cfg`, trains, and returns the records.
std::vector<RoundRecord> run_experiment(const ExperimentConfig& cfg, const RoundCallback& on_round = {});

}  // namespace fsl
