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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsl/federation.hpp"
#include "fsl/har_dataset.hpp"

namespace fsl {

enum class DataSource { Synthetic, UciHar };

/// Every knob of a run. Each field has a default; the config file and CLI
/// flags set fields by their dotted key (see config_keys()).
struct ExperimentConfig {
  TrainMode mode = TrainMode::Fsl;
  std::size_t rounds = 100;
  std::size_t clients = 5;
  std::size_t batch = 32;
  double eta_c = 0.01;
  double eta_s = 0.01;
  std::size_t local_epochs = 1;
  std::uint64_t seed = 1;
  bool deterministic = false;
  std::string out = "runs/latest";
  PartitionScheme partition = PartitionScheme::IidEqual;

  std::string model_layers;  // empty: built from the fields below
  std::size_t model_hidden = 100;
  std::size_t model_dense_units = 100;
  Activation model_dense_activation = Activation::Tanh;
  double model_dropout = 0.5;
  bool model_dropout_enabled = true;
  std::size_t model_cut_index = 2;

  DPConfig dp;
  bool dp_enabled_set = false;  // dp.enabled given explicitly

  DataSource data_source = DataSource::Synthetic;
  std::string data_path;
  SensorSelection sensors = SensorSelection::Both;
  bool data_normalize = true;

  SynthOptions synth{};
  std::size_t synth_test_per_class = 50;

  NetworkProfile network;
  bool net_quantize = false;
  ComputeProfile compute;

  CutGradient cut_gradient = CutGradient::PerClientMean;
  AggregationOrder aggregation = AggregationOrder::AfterUpdate;
  std::size_t aggregate_every = 1;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct ConfigKey {
  std::string key;
  std::string help;
};

/// All recognised keys in manifest order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key from its text value. Unknown keys and malformed values throw.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

/// Flat key-value text: one `key = value` per line, `#` starts a comment.
/// Returns the pairs in file order.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text, std::string_view origin);

/// Reads a key-value file or a JSON run manifest (detected by a leading '{'),
/// applies `overrides` on top, then validates. An empty path means defaults.
ExperimentConfig parse_config(const std::filesystem::path& file,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {});
ExperimentConfig parse_config_text(std::string_view text, std::string_view origin,
                                   const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Resolved key -> value map (what the manifest stores).
std::map<std::string, std::string> resolved_values(const ExperimentConfig& cfg);
/// Key-value text that parses back to an identical config.
std::string to_key_value_text(const ExperimentConfig& cfg);

struct ExperimentData {
  HarDataset train;
  HarDataset test;
};

/// Loads (UCI HAR) or generates (synthetic) both splits, selects channels,
/// then normalizes with training statistics.
ExperimentData load_experiment_data(const ExperimentConfig& cfg);

ModelSpec build_model_spec(const ExperimentConfig& cfg, std::size_t channels, std::size_t classes);
TrainOptions to_train_options(const ExperimentConfig& cfg, std::size_t channels, std::size_t classes);

}  // namespace fsl
