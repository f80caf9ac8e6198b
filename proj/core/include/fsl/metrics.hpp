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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsl/config.hpp"
#include "fsl/federation.hpp"

namespace fsl {

inline constexpr std::string_view kMetricsHeader =
    "round,train_loss,val_loss,val_acc,bytes_up,bytes_down,sim_time_s,wall_time_s";

/// One row per record, floats with 9 significant digits. When
/// `zero_wall_time` is set the wall_time_s column is written as 0 so that
/// replays compare byte-for-byte.
std::string format_metrics_csv(std::span<const RoundRecord> records, bool zero_wall_time = false);
void write_metrics_csv(std::span<const RoundRecord> records, const std::filesystem::path& path,
                       bool zero_wall_time = false);
/// Parses a metrics CSV back into records (ledger detail is not stored).
std::vector<RoundRecord> read_metrics_csv(const std::filesystem::path& path);

/// JSON manifest with the fully resolved config; `train --config` accepts it.
std::string format_manifest(const ExperimentConfig& cfg, std::string_view series = {});

struct EmittedFiles {
  std::filesystem::path metrics;
  std::filesystem::path manifest;
  std::filesystem::path timing;
};

/// Writes `<dir>/metrics.csv`, `<dir>/manifest.json`, and `<dir>/timing.csv`
/// (simulated transfer and compute split, measured wall time). The wall
/// time lives in timing.csv even when metrics.csv zeroes it.
EmittedFiles emit_metrics(std::span<const RoundRecord> records, const ExperimentConfig& cfg,
                          const std::filesystem::path& dir, std::string_view series = {});

}  // namespace fsl
