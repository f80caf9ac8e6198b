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

#include "fsl/layers.hpp"
#include "fsl/model_spec.hpp"
#include "fsl/params.hpp"
#include "fsl/rng.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

/// Intermediates saved by one forward pass. A cache is armed by the forward
/// that fills it and disarmed by the single backward that consumes it.
struct ForwardCache {
  std::vector<LayerCache> layers;
  std::size_t rows = 0;
  bool armed = false;
};

/// Runs `layers` in order. With a cache, every layer's intermediates are kept
/// and the cache is armed.
Tensor forward_layers(std::span<const LayerSpec> layers, const Params& params, const Tensor& x, Mode mode, Rng* rng,
                      ForwardCache* cache);

/// Backward through `layers` (which must not contain the loss head), consuming
/// the cache. Gradients are accumulated into `grads`.
Tensor backward_layers(std::span<const LayerSpec> layers, const Params& params, ForwardCache& cache,
                       const Tensor& grad_out, Params& grads, bool want_input_grad);

struct LossAndGrad {
  double loss = 0.0;
  std::size_t correct = 0;
  Params grads;
  Tensor input_grad;  // empty unless requested
};

/// Forward, mean cross-entropy, and backward over a layer range ending in the
/// softmax head. This is the unsplit path used by centralized and FL training.
LossAndGrad loss_and_gradients(std::span<const LayerSpec> layers, const Params& params, const Tensor& x,
                               std::span<const int> labels, Mode mode, Rng* rng, bool want_input_grad = false);

/// Class probabilities from a layer range ending in the softmax head.
Tensor predict(std::span<const LayerSpec> layers, const Params& params, const Tensor& x);

// ---- split execution ---------------------------------------------------

/// Client half up to the cut. Returns the cut activations [b x q].
Tensor client_forward(const ModelSpec& spec, const Params& client, const Tensor& x, ForwardCache& cache, Mode mode,
                      Rng* rng);

/// Gradient of the client half from the activation gradient; consumes the cache.
Params client_gradients(const ModelSpec& spec, const Params& client, ForwardCache& cache, const Tensor& grad_cut);

/// Client-side SGD step: client -= eta_c * G_c.
void client_backward(const ModelSpec& spec, Params& client, ForwardCache& cache, const Tensor& grad_cut,
                     double eta_c);

/// Which loss the per-client activation gradients differentiate.
enum class CutGradient {
  /// Each slice gets the gradient of that client's own mean loss, so averaging
  /// the resulting client updates reproduces one step on the pooled batch.
  PerClientMean,
  /// Each slice gets its block of the gradient of the pooled mean loss.
  GlobalMean,
};

struct ServerStep {
  double loss = 0.0;  // mean cross-entropy of the pooled batch, before the update
  std::size_t correct = 0;
  std::size_t rows = 0;
  std::vector<Tensor> cut_grads;  // one [b_n x q] slice per client, input order
  double accuracy() const { return rows == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(rows); }
};

/// Server half on the row-concatenated activations: loss, one SGD step on the
/// server parameters, and activation gradients split back by `slice_rows`.
ServerStep server_forward_backward(const ModelSpec& spec, Params& server, const Tensor& activations,
                                   std::span<const int> labels, std::span<const std::size_t> slice_rows, double eta_s,
                                   CutGradient mode = CutGradient::PerClientMean, Rng* rng = nullptr);

}  // namespace fsl
