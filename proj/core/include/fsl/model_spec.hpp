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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsl {

enum class LayerKind { Lstm, Dense, Dropout, SoftmaxCrossEntropy };
enum class Activation { None, Tanh, Relu };

std::string_view to_string(LayerKind kind);
std::string_view to_string(Activation act);

/// One layer of the declarative model description.
///
/// Lstm consumes [batch x steps x input_dim] and emits the final hidden state
/// [batch x output_dim]. Dense maps input_dim -> output_dim with an optional
/// activation. Dropout and SoftmaxCrossEntropy preserve their width; the loss
/// head may only be the final layer.
struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  double dropout_rate = 0.0;
  Activation activation = Activation::None;

  static LayerSpec lstm(std::size_t input_dim, std::size_t hidden);
  static LayerSpec dense(std::size_t input_dim, std::size_t output_dim, Activation act = Activation::None);
  static LayerSpec dropout(std::size_t dim, double rate);
  static LayerSpec softmax_xent(std::size_t classes);

  bool has_params() const noexcept { return kind == LayerKind::Lstm || kind == LayerKind::Dense; }
  bool operator==(const LayerSpec&) const = default;
};

/// Ordered layers plus the cut between the client half [0, cut_index) and the
/// server half [cut_index, size).
struct ModelSpec {
  std::vector<LayerSpec> layers;
  std::size_t cut_index = 1;

  /// Throws ConfigError on broken dimension chains or a misplaced cut/loss head.
  void validate() const;

  std::span<const LayerSpec> client_layers() const;
  std::span<const LayerSpec> server_layers() const;
  std::span<const LayerSpec> all_layers() const { return layers; }

  std::size_t input_dim() const { return layers.front().input_dim; }
  /// Width of the activations crossing the cut.
  std::size_t cut_width() const { return layers[cut_index - 1].output_dim; }
  std::size_t num_classes() const { return layers.back().output_dim; }

  bool operator==(const ModelSpec&) const = default;
};

/// LSTM(hidden) -> Dropout(rate) | Dense(dense_units, tanh) -> Dense(classes) -> softmax.
ModelSpec default_har_model(std::size_t channels, std::size_t classes = 6, std::size_t hidden = 100,
                            std::size_t dense_units = 100, double dropout_rate = 0.5,
                            Activation dense_activation = Activation::Tanh);

/// Compact text form, e.g. "lstm:100,dropout:0.5,dense:100:tanh,dense:6,softmax".
/// Input width comes from the data; the parsed spec still needs a cut index.
ModelSpec parse_layers(std::string_view text, std::size_t input_dim, std::size_t cut_index);
std::string format_layers(const ModelSpec& spec);

/// Number of scalar parameters in a layer range.
std::size_t parameter_count(std::span<const LayerSpec> layers);

}  // namespace fsl
