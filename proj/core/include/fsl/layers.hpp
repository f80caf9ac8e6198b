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
#include <variant>
#include <vector>

#include "fsl/model_spec.hpp"
#include "fsl/params.hpp"
#include "fsl/rng.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

enum class Mode { Train, Eval };

struct LstmCache {
  Tensor input;                 // [b x T x d]
  std::vector<double> gates;    // [T x b x 4H] post-activation i, f, g, o
  std::vector<double> cells;    // [(T + 1) x b x H], slot 0 is the zero initial state
  std::vector<double> hiddens;  // [(T + 1) x b x H]
};

struct DenseCache {
  Tensor input;
  Tensor output;  // post-activation
};

struct DropoutCache {
  Tensor mask;  // 0 or 1/(1-p) per element; empty when the layer was a pass-through
};

struct SoftmaxCache {
  Tensor probs;
};

using LayerCache = std::variant<std::monostate, LstmCache, DenseCache, DropoutCache, SoftmaxCache>;

/// Final hidden state of a single-layer LSTM run from zero state over x [b x T x d].
Tensor lstm_forward(const LayerSpec& spec, const LayerParams& params, const Tensor& x, LstmCache* cache);
/// Backpropagation through time from dL/dh_T. Accumulates into grads; returns
/// dL/dx when want_input_grad is set, otherwise an empty tensor.
Tensor lstm_backward(const LayerSpec& spec, const LayerParams& params, const LstmCache& cache, const Tensor& grad_out,
                     LayerParams& grads, bool want_input_grad);

Tensor dense_forward(const LayerSpec& spec, const LayerParams& params, const Tensor& x, DenseCache* cache);
Tensor dense_backward(const LayerSpec& spec, const LayerParams& params, const DenseCache& cache,
                      const Tensor& grad_out, LayerParams& grads);

/// Inverted dropout: train mode zeroes with probability p and scales survivors
/// by 1/(1-p); eval mode (or p == 0) is the identity.
Tensor dropout_forward(const LayerSpec& spec, const Tensor& x, Mode mode, Rng* rng, DropoutCache* cache);
Tensor dropout_backward(const DropoutCache& cache, const Tensor& grad_out);

/// Row-wise softmax.
Tensor softmax(const Tensor& logits);

struct XentResult {
  double loss = 0.0;       // mean over rows
  std::size_t correct = 0;
  Tensor probs;
};

/// Mean cross-entropy of softmax(logits) against integer labels in [0, K).
XentResult softmax_xent_forward(const Tensor& logits, std::span<const int> labels);
/// dL/dlogits = (softmax - onehot) / rows.
Tensor softmax_xent_backward(const Tensor& probs, std::span<const int> labels);

/// Index of the row maximum; the lowest index wins ties.
std::size_t argmax_row(const Tensor& m, std::size_t row);

/// Dispatch on spec.kind. SoftmaxCrossEntropy forward returns probabilities.
Tensor layer_forward(const LayerSpec& spec, const LayerParams& params, const Tensor& x, LayerCache* cache, Mode mode,
                     Rng* rng);
Tensor layer_backward(const LayerSpec& spec, const LayerParams& params, const LayerCache& cache,
                      const Tensor& grad_out, LayerParams& grads, bool want_input_grad);

}  // namespace fsl
