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

#include "fsl/split_model.hpp"

#include <numeric>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

namespace {

std::span<const LayerSpec> without_head(std::span<const LayerSpec> layers) {
  if (layers.empty() || layers.back().kind != LayerKind::SoftmaxCrossEntropy) {
    throw ProtocolError("layer range must end with the softmax head");
  }
  return layers.first(layers.size() - 1);
}

void check_param_count(std::span<const LayerSpec> layers, const Params& params) {
  if (params.num_layers() != layers.size()) {
    throw DimensionError("parameter list has " + std::to_string(params.num_layers()) + " layers, model range has " +
                         std::to_string(layers.size()));
  }
}

}  // namespace

Tensor forward_layers(std::span<const LayerSpec> layers, const Params& params, const Tensor& x, Mode mode, Rng* rng,
                      ForwardCache* cache) {
  if (params.num_layers() < layers.size()) throw DimensionError("parameter list shorter than layer range");
  if (cache != nullptr) {
    cache->layers.assign(layers.size(), LayerCache{});
    cache->rows = x.rank() > 0 ? x.dim(0) : 0;
  }
  Tensor h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layer_forward(layers[i], params.layer(i), h, cache != nullptr ? &cache->layers[i] : nullptr, mode, rng);
  }
  if (cache != nullptr) cache->armed = true;
  return h;
}

Tensor backward_layers(std::span<const LayerSpec> layers, const Params& params, ForwardCache& cache,
                       const Tensor& grad_out, Params& grads, bool want_input_grad) {
  if (!cache.armed) throw ProtocolError("backward called without a matching forward (stale or missing cache)");
  if (cache.layers.size() < layers.size()) throw ProtocolError("forward cache covers fewer layers than backward");
  if (grad_out.rank() == 0 || grad_out.dim(0) != cache.rows) {
    throw DimensionError("gradient " + to_string(grad_out.shape()) + " does not match cached batch of " +
                         std::to_string(cache.rows) + " rows");
  }
  cache.armed = false;
  Tensor g = grad_out;
  for (std::size_t i = layers.size(); i-- > 0;) {
    const bool need = want_input_grad || i > 0;
    g = layer_backward(layers[i], params.layer(i), cache.layers[i], g, grads.layer(i), need);
  }
  cache.layers.clear();
  return g;
}

LossAndGrad loss_and_gradients(std::span<const LayerSpec> layers, const Params& params, const Tensor& x,
                               std::span<const int> labels, Mode mode, Rng* rng, bool want_input_grad) {
  check_param_count(layers, params);
  auto body = without_head(layers);
  ForwardCache cache;
  Tensor logits = forward_layers(body, params, x, mode, rng, &cache);
  XentResult xent = softmax_xent_forward(logits, labels);
  LossAndGrad out;
  out.loss = xent.loss;
  out.correct = xent.correct;
  out.grads = Params::zeros_like(params);
  Tensor dlogits = softmax_xent_backward(xent.probs, labels);
  out.input_grad = backward_layers(body, params, cache, dlogits, out.grads, want_input_grad);
  if (!want_input_grad) out.input_grad = Tensor();
  return out;
}

Tensor predict(std::span<const LayerSpec> layers, const Params& params, const Tensor& x) {
  check_param_count(layers, params);
  return forward_layers(layers, params, x, Mode::Eval, nullptr, nullptr);
}

Tensor client_forward(const ModelSpec& spec, const Params& client, const Tensor& x, ForwardCache& cache, Mode mode,
                      Rng* rng) {
  auto layers = spec.client_layers();
  check_param_count(layers, client);
  return forward_layers(layers, client, x, mode, rng, &cache);
}

Params client_gradients(const ModelSpec& spec, const Params& client, ForwardCache& cache, const Tensor& grad_cut) {
  auto layers = spec.client_layers();
  check_param_count(layers, client);
  if (grad_cut.rank() != 2 || grad_cut.dim(1) != spec.cut_width()) {
    throw DimensionError("cut gradient " + to_string(grad_cut.shape()) + " does not match cut width " +
                         std::to_string(spec.cut_width()));
  }
  Params grads = Params::zeros_like(client);
  backward_layers(layers, client, cache, grad_cut, grads, false);
  return grads;
}

void client_backward(const ModelSpec& spec, Params& client, ForwardCache& cache, const Tensor& grad_cut,
                     double eta_c) {
  Params grads = client_gradients(spec, client, cache, grad_cut);
  client.sgd_step(grads, eta_c);
}

ServerStep server_forward_backward(const ModelSpec& spec, Params& server, const Tensor& activations,
                                   std::span<const int> labels, std::span<const std::size_t> slice_rows, double eta_s,
                                   CutGradient mode, Rng* rng) {
  auto layers = spec.server_layers();
  check_param_count(layers, server);
  if (activations.rank() != 2 || activations.dim(1) != spec.cut_width()) {
    throw DimensionError("server expects activations [rows x " + std::to_string(spec.cut_width()) + "], got " +
                         to_string(activations.shape()));
  }
  const std::size_t rows = activations.dim(0);
  if (labels.size() != rows) {
    throw DimensionError("activation rows " + std::to_string(rows) + " != label rows " +
                         std::to_string(labels.size()));
  }
  if (std::accumulate(slice_rows.begin(), slice_rows.end(), std::size_t{0}) != rows) {
    throw DimensionError("client slice sizes do not add up to " + std::to_string(rows) + " rows");
  }

  LossAndGrad lg = loss_and_gradients(layers, server, activations, labels, Mode::Train, rng, true);

  ServerStep step;
  step.loss = lg.loss;
  step.correct = lg.correct;
  step.rows = rows;
  std::size_t offset = 0;
  for (std::size_t n : slice_rows) {
    Tensor slice = lg.input_grad.slice_rows(offset, offset + n);
    if (mode == CutGradient::PerClientMean && n != rows && n > 0) {
      slice = scale(slice, static_cast<double>(rows) / static_cast<double>(n));
    }
    step.cut_grads.push_back(std::move(slice));
    offset += n;
  }
  server.sgd_step(lg.grads, eta_s);
  return step;
}

}  // namespace fsl
