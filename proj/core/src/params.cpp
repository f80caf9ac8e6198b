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

#include "fsl/params.hpp"

#include <algorithm>
#include <cmath>

#include "fsl/error.hpp"

namespace fsl {

Params Params::zeros(std::span<const LayerSpec> layers) {
  std::vector<LayerParams> out;
  out.reserve(layers.size());
  for (const LayerSpec& l : layers) {
    LayerParams lp;
    if (l.kind == LayerKind::Lstm) {
      const std::size_t g = 4 * l.output_dim;
      lp.tensors = {Tensor({g, l.input_dim}), Tensor({g, l.output_dim}), Tensor({g})};
    } else if (l.kind == LayerKind::Dense) {
      lp.tensors = {Tensor({l.output_dim, l.input_dim}), Tensor({l.output_dim})};
    }
    out.push_back(std::move(lp));
  }
  return Params(std::move(out));
}

Params Params::zeros_like(const Params& other) {
  std::vector<LayerParams> out;
  out.reserve(other.layers_.size());
  for (const LayerParams& lp : other.layers_) {
    LayerParams z;
    for (const Tensor& t : lp.tensors) z.tensors.emplace_back(t.shape());
    out.push_back(std::move(z));
  }
  return Params(std::move(out));
}

std::size_t Params::size() const noexcept {
  std::size_t n = 0;
  for (const auto& lp : layers_)
    for (const auto& t : lp.tensors) n += t.size();
  return n;
}

std::vector<double> Params::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& lp : layers_)
    for (const auto& t : lp.tensors) flat.insert(flat.end(), t.data().begin(), t.data().end());
  return flat;
}

void Params::unflatten(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw DimensionError("unflatten: expected " + std::to_string(size()) + " values, got " +
                         std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for (auto& lp : layers_) {
    for (auto& t : lp.tensors) {
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), t.size(), t.data().begin());
      offset += t.size();
    }
  }
}

bool Params::same_shapes(const Params& other) const noexcept {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i].tensors;
    const auto& b = other.layers_[i].tensors;
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j].shape() != b[j].shape()) return false;
  }
  return true;
}

void Params::axpy(double factor, const Params& other) {
  if (!same_shapes(other)) throw DimensionError("params shape mismatch in update");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (std::size_t j = 0; j < layers_[i].tensors.size(); ++j) {
      auto dst = layers_[i].tensors[j].data();
      auto src = other.layers_[i].tensors[j].data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += factor * src[k];
    }
  }
}

void Params::sgd_step(const Params& grads, double lr) {
  if (lr == 0.0) return;
  axpy(-lr, grads);
}

Params init_params(std::span<const LayerSpec> layers, Rng& rng) {
  Params p = Params::zeros(layers);
  auto glorot = [&rng](Tensor& w, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data()) v = rng.uniform(-limit, limit);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    auto& t = p.layer(i).tensors;
    if (l.kind == LayerKind::Lstm) {
      const std::size_t h = l.output_dim;
      glorot(t[0], l.input_dim, 4 * h);
      glorot(t[1], h, 4 * h);
      for (std::size_t j = h; j < 2 * h; ++j) t[2][j] = 1.0;
    } else if (l.kind == LayerKind::Dense) {
      glorot(t[0], l.input_dim, l.output_dim);
    }
  }
  return p;
}

std::pair<Params, Params> split_params(const Params& full, std::size_t cut_index) {
  const auto& all = full.layers();
  if (cut_index > all.size()) throw DimensionError("cut index beyond parameter layers");
  return {Params({all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut_index)}),
          Params({all.begin() + static_cast<std::ptrdiff_t>(cut_index), all.end()})};
}

Params join_params(const Params& client, const Params& server) {
  std::vector<LayerParams> all = client.layers();
  all.insert(all.end(), server.layers().begin(), server.layers().end());
  return Params(std::move(all));
}

double max_abs_diff(const Params& a, const Params& b) {
  if (!a.same_shapes(b)) throw DimensionError("params shape mismatch");
  auto fa = a.flatten();
  auto fb = b.flatten();
  double m = 0;
  for (std::size_t i = 0; i < fa.size(); ++i) m = std::max(m, std::abs(fa[i] - fb[i]));
  return m;
}

}  // namespace fsl
