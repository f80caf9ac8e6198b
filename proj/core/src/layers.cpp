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

#include "fsl/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

namespace {

double activate(Activation act, double v) {
  switch (act) {
    case Activation::None: return v;
    case Activation::Tanh: return std::tanh(v);
    case Activation::Relu: return v > 0.0 ? v : 0.0;
  }
  return v;
}

// Derivative expressed through the post-activation value.
double activation_slope(Activation act, double out) {
  switch (act) {
    case Activation::None: return 1.0;
    case Activation::Tanh: return 1.0 - out * out;
    case Activation::Relu: return out > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

}  // namespace

Tensor dense_forward(const LayerSpec& spec, const LayerParams& params, const Tensor& x, DenseCache* cache) {
  if (x.rank() != 2 || x.dim(1) != spec.input_dim) {
    throw DimensionError("dense expects [batch x " + std::to_string(spec.input_dim) + "], got " +
                         to_string(x.shape()));
  }
  const Tensor& w = params.tensors.at(0);
  const Tensor& bias = params.tensors.at(1);
  if (w.shape() != Shape{spec.output_dim, spec.input_dim} || bias.shape() != Shape{spec.output_dim}) {
    throw DimensionError("dense parameters do not match layer spec");
  }
  const std::size_t b = x.dim(0), in = spec.input_dim, out_dim = spec.output_dim;
  Tensor out({b, out_dim});
  for (std::size_t n = 0; n < b; ++n) {
    const double* xn = x.data().data() + n * in;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double* wo = w.data().data() + o * in;
      double s = bias[o];
      for (std::size_t i = 0; i < in; ++i) s += wo[i] * xn[i];
      out.at(n, o) = activate(spec.activation, s);
    }
  }
  if (cache != nullptr) {
    cache->input = x;
    cache->output = out;
  }
  return out;
}

Tensor dense_backward(const LayerSpec& spec, const LayerParams& params, const DenseCache& cache,
                      const Tensor& grad_out, LayerParams& grads) {
  const Tensor& x = cache.input;
  const std::size_t b = x.dim(0), in = spec.input_dim, out_dim = spec.output_dim;
  if (grad_out.shape() != Shape{b, out_dim}) {
    throw DimensionError("dense backward expects gradient " + to_string(Shape{b, out_dim}) + ", got " +
                         to_string(grad_out.shape()));
  }
  const Tensor& w = params.tensors[0];
  double* dw = grads.tensors[0].data().data();
  double* db = grads.tensors[1].data().data();
  Tensor dx({b, in});
  for (std::size_t n = 0; n < b; ++n) {
    const double* xn = x.data().data() + n * in;
    double* dxn = dx.data().data() + n * in;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double g = grad_out.at(n, o) * activation_slope(spec.activation, cache.output.at(n, o));
      if (g == 0.0) continue;
      db[o] += g;
      double* dwo = dw + o * in;
      const double* wo = w.data().data() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        dwo[i] += g * xn[i];
        dxn[i] += g * wo[i];
      }
    }
  }
  return dx;
}

Tensor dropout_forward(const LayerSpec& spec, const Tensor& x, Mode mode, Rng* rng, DropoutCache* cache) {
  const double p = spec.dropout_rate;
  if (mode == Mode::Eval || p == 0.0) {
    if (cache != nullptr) cache->mask = Tensor();
    return x;
  }
  if (rng == nullptr) throw ProtocolError("dropout in train mode needs an rng");
  Tensor mask(x.shape());
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& m : mask.data()) m = rng->uniform() >= p ? keep_scale : 0.0;
  Tensor out = mul(x, mask);
  if (cache != nullptr) cache->mask = std::move(mask);
  return out;
}

Tensor dropout_backward(const DropoutCache& cache, const Tensor& grad_out) {
  if (cache.mask.empty()) return grad_out;
  return mul(grad_out, cache.mask);
}

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) throw DimensionError("softmax expects a matrix, got " + to_string(logits.shape()));
  const std::size_t rows = logits.dim(0), k = logits.dim(1);
  Tensor p(logits.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = logits.at(r, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, logits.at(r, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p.at(r, j) = std::exp(logits.at(r, j) - mx);
      sum += p.at(r, j);
    }
    for (std::size_t j = 0; j < k; ++j) p.at(r, j) /= sum;
  }
  return p;
}

namespace {
void check_labels(const Tensor& m, std::span<const int> labels) {
  if (m.rank() != 2 || labels.size() != m.dim(0)) {
    throw DimensionError("label count " + std::to_string(labels.size()) + " does not match rows of " +
                         to_string(m.shape()));
  }
  const auto k = static_cast<int>(m.dim(1));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || labels[r] >= k) {
      throw DataError("label " + std::to_string(labels[r]) + " at row " + std::to_string(r) +
                      " outside [0, " + std::to_string(k) + ")");
    }
  }
}
}  // namespace

std::size_t argmax_row(const Tensor& m, std::size_t row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < m.dim(1); ++j)
    if (m.at(row, j) > m.at(row, best)) best = j;
  return best;
}

XentResult softmax_xent_forward(const Tensor& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  XentResult res;
  res.probs = softmax(logits);
  const std::size_t rows = logits.dim(0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto y = static_cast<std::size_t>(labels[r]);
    // log-sum-exp form keeps the loss finite when a probability underflows.
    double mx = logits.at(r, 0);
    for (std::size_t j = 1; j < logits.dim(1); ++j) mx = std::max(mx, logits.at(r, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.dim(1); ++j) sum += std::exp(logits.at(r, j) - mx);
    total += std::log(sum) + mx - logits.at(r, y);
    if (argmax_row(res.probs, r) == y) ++res.correct;
  }
  res.loss = rows == 0 ? 0.0 : total / static_cast<double>(rows);
  return res;
}

Tensor softmax_xent_backward(const Tensor& probs, std::span<const int> labels) {
  check_labels(probs, labels);
  Tensor g = probs;
  const double inv = 1.0 / static_cast<double>(probs.dim(0));
  for (std::size_t r = 0; r < probs.dim(0); ++r) {
    g.at(r, static_cast<std::size_t>(labels[r])) -= 1.0;
    for (std::size_t j = 0; j < probs.dim(1); ++j) g.at(r, j) *= inv;
  }
  return g;
}

Tensor layer_forward(const LayerSpec& spec, const LayerParams& params, const Tensor& x, LayerCache* cache, Mode mode,
                     Rng* rng) {
  switch (spec.kind) {
    case LayerKind::Lstm: {
      if (cache == nullptr) return lstm_forward(spec, params, x, nullptr);
      LstmCache c;
      Tensor out = lstm_forward(spec, params, x, &c);
      *cache = std::move(c);
      return out;
    }
    case LayerKind::Dense: {
      if (cache == nullptr) return dense_forward(spec, params, x, nullptr);
      DenseCache c;
      Tensor out = dense_forward(spec, params, x, &c);
      *cache = std::move(c);
      return out;
    }
    case LayerKind::Dropout: {
      DropoutCache c;
      Tensor out = dropout_forward(spec, x, mode, rng, cache != nullptr ? &c : nullptr);
      if (cache != nullptr) *cache = std::move(c);
      return out;
    }
    case LayerKind::SoftmaxCrossEntropy: {
      Tensor p = softmax(x);
      if (cache != nullptr) *cache = SoftmaxCache{p};
      return p;
    }
  }
  throw Error("unknown layer kind");
}

Tensor layer_backward(const LayerSpec& spec, const LayerParams& params, const LayerCache& cache,
                      const Tensor& grad_out, LayerParams& grads, bool want_input_grad) {
  switch (spec.kind) {
    case LayerKind::Lstm:
      if (const auto* c = std::get_if<LstmCache>(&cache)) {
        return lstm_backward(spec, params, *c, grad_out, grads, want_input_grad);
      }
      break;
    case LayerKind::Dense:
      if (const auto* c = std::get_if<DenseCache>(&cache)) return dense_backward(spec, params, *c, grad_out, grads);
      break;
    case LayerKind::Dropout:
      if (const auto* c = std::get_if<DropoutCache>(&cache)) return dropout_backward(*c, grad_out);
      break;
    case LayerKind::SoftmaxCrossEntropy:
      throw ProtocolError("softmax head is differentiated through the loss, not layer_backward");
  }
  throw ProtocolError("layer cache missing for " + std::string(to_string(spec.kind)) + " backward");
}

}  // namespace fsl
