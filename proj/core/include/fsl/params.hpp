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
#include <vector>

#include "fsl/model_spec.hpp"
#include "fsl/rng.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

/// Weights of one layer. Lstm: {input weights [4H x d], recurrent weights
/// [4H x H], bias [4H]} with gate blocks ordered input, forget, cell, output.
/// Dense: {weight [out x in], bias [out]}. Parameter-free layers hold nothing.
struct LayerParams {
  std::vector<Tensor> tensors;
  bool operator==(const LayerParams&) const = default;
};

/// Parameters of a contiguous layer range (a whole model or one side of the cut).
class Params {
 public:
  Params() = default;
  explicit Params(std::vector<LayerParams> layers) : layers_(std::move(layers)) {}

  /// Zero-valued parameters with the shapes `layers` require.
  static Params zeros(std::span<const LayerSpec> layers);
  static Params zeros_like(const Params& other);

  std::size_t num_layers() const noexcept { return layers_.size(); }
  LayerParams& layer(std::size_t i) { return layers_.at(i); }
  const LayerParams& layer(std::size_t i) const { return layers_.at(i); }
  const std::vector<LayerParams>& layers() const noexcept { return layers_; }

  /// Total scalar count (u for the client half, r for the server half).
  std::size_t size() const noexcept;

  std::vector<double> flatten() const;
  /// Overwrites every tensor from a flat vector of exactly size() values.
  void unflatten(std::span<const double> flat);

  bool same_shapes(const Params& other) const noexcept;

  /// this -= lr * grads
  void sgd_step(const Params& grads, double lr);
  /// this += factor * other
  void axpy(double factor, const Params& other);

  bool operator==(const Params&) const = default;

 private:
  std::vector<LayerParams> layers_;
};

/// Glorot-uniform weights with bounds sqrt(6 / (fan_in + fan_out)), zero biases,
/// and LSTM forget-gate biases of 1.
Params init_params(std::span<const LayerSpec> layers, Rng& rng);

/// Splits full-model parameters at the cut: {client, server}.
std::pair<Params, Params> split_params(const Params& full, std::size_t cut_index);
Params join_params(const Params& client, const Params& server);

double max_abs_diff(const Params& a, const Params& b);

}  // namespace fsl
