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

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsl/rng.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

inline constexpr std::size_t kUciTimesteps = 128;
inline constexpr std::size_t kUciClasses = 6;

/// The nine raw inertial-signal channels, in stacking order.
inline constexpr std::array<std::string_view, 9> kUciChannels = {
    "body_acc_x",  "body_acc_y",  "body_acc_z",  "body_gyro_x", "body_gyro_y",
    "body_gyro_z", "total_acc_x", "total_acc_y", "total_acc_z",
};

enum class SensorSelection {
  Both,           // all 9 channels
  AccelOnly,      // body_acc + total_acc (6)
  GyroOnly,       // body_gyro (3)
  BodyAccelOnly,  // body_acc (3)
};

std::string_view to_string(SensorSelection s);
SensorSelection parse_sensor_selection(std::string_view text);
std::vector<std::string> selected_channels(SensorSelection s);

/// Windows [num_windows x timesteps x channels] with 0-based labels.
struct HarDataset {
  Tensor windows;
  std::vector<int> labels;
  std::vector<int> subject_ids;
  std::vector<std::string> channel_names;
  std::size_t num_classes = kUciClasses;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t timesteps() const { return windows.dim(1); }
  std::size_t channels() const { return windows.dim(2); }

  /// Windows and labels for the given sample indices, in that order.
  Tensor gather_windows(std::span<const std::size_t> indices) const;
  std::vector<int> gather_labels(std::span<const std::size_t> indices) const;
  HarDataset subset(std::span<const std::size_t> indices) const;

  std::vector<int> distinct_subjects() const;
  /// Throws DataError if shapes, labels, or subject ids disagree.
  void validate() const;
};

struct HarSplits {
  HarDataset train;
  HarDataset test;
};

/// Reads `<root>/<split>/Inertial Signals/<channel>_<split>.txt` for all nine
/// channels plus `y_<split>.txt` and `subject_<split>.txt`, then keeps the
/// channels named by `selection`. Labels are remapped from 1..6 to 0..5.
HarDataset load_uci_split(const std::filesystem::path& root, std::string_view split, SensorSelection selection);
HarSplits load_uci_har(const std::filesystem::path& root, SensorSelection selection);

/// Writes a dataset in the same layout (1-based labels). Values are printed
/// with `precision` significant digits; 17 round-trips doubles exactly.
void write_uci_split(const HarDataset& data, const std::filesystem::path& root, std::string_view split,
                     int precision = 17);

/// Keeps only the channels of `selection`; the input must carry UCI channel names.
HarDataset select_channels(const HarDataset& data, SensorSelection selection);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct NormalizedSplits {
  HarDataset train;
  HarDataset test;
  NormStats stats;
};

inline constexpr double kStdFloor = 1e-8;

/// Per-channel z-scoring with statistics from the training split only.
NormalizedSplits normalize(const HarDataset& train, const HarDataset& test);
HarDataset apply_normalization(const HarDataset& data, const NormStats& stats);

enum class PartitionScheme { IidEqual, BySubject };

std::string_view to_string(PartitionScheme s);
PartitionScheme parse_partition_scheme(std::string_view text);

/// Sample indices per client. IID-equal shuffles then deals round-robin;
/// by-subject deals whole subjects round-robin in sorted subject-id order.
std::vector<std::vector<std::size_t>> partition_indices(const HarDataset& data, std::size_t clients,
                                                        PartitionScheme scheme, Rng& rng);
std::vector<HarDataset> partition(const HarDataset& data, std::size_t clients, PartitionScheme scheme, Rng& rng);

struct SynthOptions {
  std::size_t num_classes = 6;
  std::size_t channels = 9;
  std::size_t timesteps = 128;
  std::size_t samples_per_class = 50;
  double noise_std = 0.5;
  /// Subject ids are assigned round-robin within each class over the subjects
  /// that hold it.
  std::size_t num_subjects = 30;
  /// Classes held by each subject; subject s holds classes s, s+1, ... (mod K).
  /// 0 means every subject holds every class.
  std::size_t classes_per_subject = 0;
};

/// Class k, channel c is sin(2 pi f_kc t / T + phi_kc) plus N(0, noise_std^2).
/// Frequencies and phases depend only on (k, c), so separately generated
/// train and test sets share class templates.
HarDataset synth_dataset(const SynthOptions& opts, Rng& rng);
HarDataset synth_dataset(std::size_t num_classes, std::size_t channels, std::size_t timesteps,
                         std::size_t samples_per_class, double noise_std, Rng& rng);

}  // namespace fsl
