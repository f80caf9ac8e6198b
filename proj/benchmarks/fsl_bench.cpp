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

#include <benchmark/benchmark.h>

#include <vector>

#include "fsl/codec.hpp"
#include "fsl/dp.hpp"
#include "fsl/federation.hpp"
#include "fsl/layers.hpp"
#include "fsl/params.hpp"
#include "fsl/rng.hpp"
#include "fsl/tensor.hpp"

namespace {

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  fsl::Rng rng(1);
  const fsl::Tensor a = fsl::uniform_sample(rng, {n, n}, -1.0, 1.0);
  const fsl::Tensor b = fsl::uniform_sample(rng, {n, n}, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fsl::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(100)->Arg(256);

struct LstmSetup {
  fsl::LayerSpec spec;
  fsl::Params params;
  fsl::Tensor x;

  LstmSetup(std::size_t batch, std::size_t steps, std::size_t in, std::size_t hidden)
      : spec(fsl::LayerSpec::lstm(in, hidden)) {
    fsl::Rng rng(2);
    const std::vector<fsl::LayerSpec> layers{spec};
    params = fsl::init_params(layers, rng);
    x = fsl::gaussian_sample(rng, {batch, steps, in}, 0.0, 1.0);
  }
};

void BM_LstmForward(benchmark::State& state) {
  LstmSetup s(static_cast<std::size_t>(state.range(0)), 128, 9, 100);
  for (auto _ : state) {
    fsl::LstmCache cache;
    benchmark::DoNotOptimize(fsl::lstm_forward(s.spec, s.params.layer(0), s.x, &cache));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LstmForward)->Arg(1)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_LstmBackward(benchmark::State& state) {
  LstmSetup s(static_cast<std::size_t>(state.range(0)), 128, 9, 100);
  fsl::LstmCache cache;
  const fsl::Tensor h = fsl::lstm_forward(s.spec, s.params.layer(0), s.x, &cache);
  const fsl::Tensor g(h.shape(), 1.0);
  const std::vector<fsl::LayerSpec> layers{s.spec};
  for (auto _ : state) {
    fsl::Params grads = fsl::Params::zeros(layers);
    benchmark::DoNotOptimize(fsl::lstm_backward(s.spec, s.params.layer(0), cache, g, grads.layer(0), false));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LstmBackward)->Arg(1)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ApplyDp(benchmark::State& state) {
  fsl::Rng rng(3);
  const fsl::Tensor a = fsl::uniform_sample(rng, {32, 100}, -1.0, 1.0);
  fsl::DPConfig cfg;
  cfg.enabled = true;
  cfg.epsilon = 40.0;
  for (auto _ : state) benchmark::DoNotOptimize(fsl::apply_dp(a, cfg, rng));
}
BENCHMARK(BM_ApplyDp);

void BM_EncodeActivations(benchmark::State& state) {
  fsl::Rng rng(4);
  const fsl::Tensor a = fsl::uniform_sample(rng, {32, 100}, -1.0, 1.0);
  const fsl::WireFormat fmt{};
  for (auto _ : state) benchmark::DoNotOptimize(fsl::encode_tensor(a, fmt));
  state.SetBytesProcessed(state.iterations() * 32 * 100 * 4);
}
BENCHMARK(BM_EncodeActivations);

void BM_FedAvgDefaultClientModel(benchmark::State& state) {
  const fsl::ModelSpec spec = fsl::default_har_model(9);
  std::vector<fsl::Params> w;
  for (std::uint64_t n = 0; n < 5; ++n) {
    fsl::Rng rng(10 + n);
    w.push_back(fsl::init_params(spec.client_layers(), rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fsl::fedavg(w));
}
BENCHMARK(BM_FedAvgDefaultClientModel);

}  // namespace

BENCHMARK_MAIN();
