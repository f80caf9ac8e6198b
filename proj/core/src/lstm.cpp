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

#include <cmath>
#include <string>

#include "fsl/error.hpp"
#include "fsl/layers.hpp"

namespace fsl {

namespace {

void check_lstm(const LayerSpec& spec, const LayerParams& params, const Tensor& x) {
  if (x.rank() != 3 || x.dim(2) != spec.input_dim) {
    throw DimensionError("lstm expects [batch x steps x " + std::to_string(spec.input_dim) + "], got " +
                         to_string(x.shape()));
  }
  if (x.dim(1) == 0) throw DimensionError("lstm input has zero timesteps");
  const std::size_t g = 4 * spec.output_dim;
  if (params.tensors.size() != 3 || params.tensors[0].shape() != Shape{g, spec.input_dim} ||
      params.tensors[1].shape() != Shape{g, spec.output_dim} || params.tensors[2].shape() != Shape{g}) {
    throw DimensionError("lstm parameters do not match layer spec");
  }
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

Tensor lstm_forward(const LayerSpec& spec, const LayerParams& params, const Tensor& x, LstmCache* cache) {
  check_lstm(spec, params, x);
  const std::size_t b = x.dim(0), steps = x.dim(1), d = x.dim(2), h = spec.output_dim, g4 = 4 * h;
  const double* wx = params.tensors[0].data().data();
  const double* wh = params.tensors[1].data().data();
  const double* bias = params.tensors[2].data().data();
  const double* xd = x.data().data();

  std::vector<double> gates(steps * b * g4);
  std::vector<double> cells((steps + 1) * b * h, 0.0);
  std::vector<double> hiddens((steps + 1) * b * h, 0.0);

  for (std::size_t t = 0; t < steps; ++t) {
    const double* h_prev = hiddens.data() + t * b * h;
    const double* c_prev = cells.data() + t * b * h;
    double* h_cur = hiddens.data() + (t + 1) * b * h;
    double* c_cur = cells.data() + (t + 1) * b * h;
    double* z = gates.data() + t * b * g4;
    for (std::size_t n = 0; n < b; ++n) {
      const double* xt = xd + (n * steps + t) * d;
      const double* hn = h_prev + n * h;
      double* zn = z + n * g4;
      for (std::size_t j = 0; j < g4; ++j) {
        zn[j] = bias[j] + dot(wx + j * d, xt, d) + dot(wh + j * h, hn, h);
      }
      for (std::size_t k = 0; k < h; ++k) {
        const double ig = sigmoid(zn[k]);
        const double fg = sigmoid(zn[h + k]);
        const double cg = std::tanh(zn[2 * h + k]);
        const double og = sigmoid(zn[3 * h + k]);
        zn[k] = ig;
        zn[h + k] = fg;
        zn[2 * h + k] = cg;
        zn[3 * h + k] = og;
        const double c = fg * c_prev[n * h + k] + ig * cg;
        c_cur[n * h + k] = c;
        h_cur[n * h + k] = og * std::tanh(c);
      }
    }
  }

  Tensor out({b, h}, std::vector<double>(hiddens.end() - static_cast<std::ptrdiff_t>(b * h), hiddens.end()));
  if (cache != nullptr) {
    cache->input = x;
    cache->gates = std::move(gates);
    cache->cells = std::move(cells);
    cache->hiddens = std::move(hiddens);
  }
  return out;
}

Tensor lstm_backward(const LayerSpec& spec, const LayerParams& params, const LstmCache& cache, const Tensor& grad_out,
                     LayerParams& grads, bool want_input_grad) {
  const Tensor& x = cache.input;
  check_lstm(spec, params, x);
  const std::size_t b = x.dim(0), steps = x.dim(1), d = x.dim(2), h = spec.output_dim, g4 = 4 * h;
  if (grad_out.shape() != Shape{b, h}) {
    throw DimensionError("lstm backward expects gradient " + to_string(Shape{b, h}) + ", got " +
                         to_string(grad_out.shape()));
  }
  if (cache.gates.size() != steps * b * g4) throw ProtocolError("lstm cache does not match its input");

  const double* wx = params.tensors[0].data().data();
  const double* wh = params.tensors[1].data().data();
  double* dwx = grads.tensors[0].data().data();
  double* dwh = grads.tensors[1].data().data();
  double* dbias = grads.tensors[2].data().data();
  const double* xd = x.data().data();

  Tensor dx;
  if (want_input_grad) dx = Tensor({b, steps, d});

  std::vector<double> dh(grad_out.data().begin(), grad_out.data().end());
  std::vector<double> dh_prev(b * h);
  std::vector<double> dc(b * h, 0.0);
  std::vector<double> dz(b * g4);

  for (std::size_t t = steps; t-- > 0;) {
    const double* gates = cache.gates.data() + t * b * g4;
    const double* c_prev = cache.cells.data() + t * b * h;
    const double* c_cur = cache.cells.data() + (t + 1) * b * h;
    const double* h_prev = cache.hiddens.data() + t * b * h;

    for (std::size_t n = 0; n < b; ++n) {
      const double* gn = gates + n * g4;
      double* dzn = dz.data() + n * g4;
      for (std::size_t k = 0; k < h; ++k) {
        const double ig = gn[k], fg = gn[h + k], cg = gn[2 * h + k], og = gn[3 * h + k];
        const double tc = std::tanh(c_cur[n * h + k]);
        const double dhv = dh[n * h + k];
        const double dcv = dc[n * h + k] + dhv * og * (1.0 - tc * tc);
        dzn[k] = dcv * cg * ig * (1.0 - ig);
        dzn[h + k] = dcv * c_prev[n * h + k] * fg * (1.0 - fg);
        dzn[2 * h + k] = dcv * ig * (1.0 - cg * cg);
        dzn[3 * h + k] = dhv * tc * og * (1.0 - og);
        dc[n * h + k] = dcv * fg;
      }
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t n = 0; n < b; ++n) {
      const double* dzn = dz.data() + n * g4;
      const double* xt = xd + (n * steps + t) * d;
      const double* hn = h_prev + n * h;
      double* dhp = dh_prev.data() + n * h;
      double* dxt = want_input_grad ? dx.data().data() + (n * steps + t) * d : nullptr;
      for (std::size_t j = 0; j < g4; ++j) {
        const double g = dzn[j];
        if (g == 0.0) continue;
        dbias[j] += g;
        axpy(g, xt, dwx + j * d, d);
        axpy(g, hn, dwh + j * h, h);
        axpy(g, wh + j * h, dhp, h);
        if (dxt != nullptr) axpy(g, wx + j * d, dxt, d);
      }
    }
    dh.swap(dh_prev);
  }
  return dx;
}

}  // namespace fsl
