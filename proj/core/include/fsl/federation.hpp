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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fsl/comm_model.hpp"
#include "fsl/dp.hpp"
#include "fsl/har_dataset.hpp"
#include "fsl/model_spec.hpp"
#include "fsl/params.hpp"
#include "fsl/rng.hpp"
#include "fsl/split_model.hpp"

namespace fsl {

enum class TrainMode { Fsl, Fl, Centralized };
std::string_view to_string(TrainMode m);
TrainMode parse_train_mode(std::string_view text);

/// When the server averages client weights relative to the clients' local step.
enum class AggregationOrder {
  /// Clients finish their local update, then the server averages W_{c,n}(t).
  AfterUpdate,
  /// The server averages the weights the clients used this round, then each
  /// client applies its own gradient on top of the average.
  BeforeUpdate,
};
std::string_view to_string(AggregationOrder o);
AggregationOrder parse_aggregation_order(std::string_view text);

/// Epoch-style sampler: draws from a shuffled order without replacement and
/// reshuffles once fewer than `batch` indices remain.
class BatchSampler {
 public:
  BatchSampler(std::size_t population, Rng rng) : population_(population), rng_(rng) {}
  std::vector<std::size_t> next(std::size_t batch);
  /// A fresh full permutation (one FL local epoch).
  std::vector<std::size_t> epoch();

 private:
  std::size_t population_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// One edge device. `params` is the client half in FSL and the full local
/// model copy in FL. The raw inputs in `data` never leave this struct.
struct ClientState {
  std::size_t id = 0;
  Params params;
  HarDataset data;
  DPConfig dp;
  double eta_c = 0.01;
  double eta_s = 0.01;  // FL trains the server layers locally too
  BatchSampler sampler{0, Rng(0)};
  Rng dropout_rng;
  Rng noise_rng;
  ForwardCache cache;  // pending forward awaiting the server's gradient
};

struct ServerState {
  Params params;  // server half (FSL) or global full model (FL, centralized)
  double eta_s = 0.01;
  double eta_c = 0.01;  // centralized/FL: rate applied to the client-half layers
  Rng rng;              // server-side dropout, if any
  std::vector<Params> aggregation_buffer;
};

/// What a client transmits after its forward pass.
struct ActivationUpload {
  std::size_t client = 0;
  Tensor activations;
  std::vector<int> labels;
};

struct RoundRecord {
  std::size_t round = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  std::uint64_t bytes_uplink = 0;
  std::uint64_t bytes_downlink = 0;
  double sim_time_s = 0.0;
  double sim_transfer_s = 0.0;  // network legs of sim_time_s
  double sim_compute_s = 0.0;   // client and server compute of sim_time_s
  double wall_time_s = 0.0;
  TrafficLedger ledger;
};

struct RoundOptions {
  std::size_t batch = 32;
  Mode dropout = Mode::Train;  // Eval disables dropout masks
  CutGradient cut_gradient = CutGradient::PerClientMean;
  AggregationOrder order = AggregationOrder::AfterUpdate;
  bool aggregate = true;  // false skips this round's weight exchange
  std::size_t local_epochs = 1;
  bool deterministic = true;  // false runs client phases on worker threads
  bool quantize_wire = false;
  NetworkProfile network;
  ComputeProfile compute;
};

/// Unweighted arithmetic mean. With ids, inputs are summed in ascending id
/// order so the result does not depend on arrival order.
Params fedavg(std::span<const Params> weights);
Params fedavg(std::span<const Params> weights, std::span<const std::size_t> ids);

/// Client phase of an FSL round: sample b local windows, run the client half,
/// perturb the activations. Leaves the forward cache armed.
ActivationUpload client_activation_stage(const ModelSpec& spec, ClientState& client, const RoundOptions& opts);

/// Server phase: concatenate uploads (sorted by client id), loss, one server
/// SGD step, per-client activation gradients in the same order as `uploads`.
ServerStep server_activation_stage(const ModelSpec& spec, ServerState& server, std::span<const ActivationUpload> uploads,
                                   CutGradient mode);

/// One FSL round across all clients.
RoundRecord fsl_round(const ModelSpec& spec, std::vector<ClientState>& clients, ServerState& server,
                      const RoundOptions& opts, std::size_t round);

/// One FedAvg round of the full model. `server.params` holds the global model.
RoundRecord fl_round(const ModelSpec& spec, std::vector<ClientState>& clients, ServerState& server,
                     const RoundOptions& opts, std::size_t round);

/// One unsplit SGD step on the clients' pooled batches (reference trajectory).
RoundRecord centralized_round(const ModelSpec& spec, std::vector<ClientState>& clients, ServerState& server,
                              const RoundOptions& opts, std::size_t round);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Both halves in eval mode, no noise.
Evaluation evaluate(const ModelSpec& spec, const Params& client, const Params& server, const HarDataset& data);

/// SGD step with separate rates for the layers before and after the cut.
void split_rate_step(Params& full, const Params& grads, std::size_t cut_index, double eta_c, double eta_s);

struct TrainOptions {
  TrainMode mode = TrainMode::Fsl;
  ModelSpec spec;
  std::size_t rounds = 100;
  std::size_t clients = 5;
  double eta_c = 0.01;
  double eta_s = 0.01;
  DPConfig dp;
  PartitionScheme partition = PartitionScheme::IidEqual;
  std::uint64_t seed = 1;
  std::size_t aggregate_every = 1;
  RoundOptions round;
};

using RoundCallback = std::function<void(const RoundRecord&)>;

/// Runs `rounds` rounds and evaluates on `validation` after each.
std::vector<RoundRecord> train(const TrainOptions& opts, const HarDataset& train_data, const HarDataset& validation,
                               const RoundCallback& on_round = {});

/// Client and server states as `train` sets them up before round 1.
struct Federation {
  std::vector<ClientState> clients;
  ServerState server;
};
Federation make_federation(const TrainOptions& opts, const HarDataset& train_data);

}  // namespace fsl
