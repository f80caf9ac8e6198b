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

#include "fsl/comm_model.hpp"

#include <algorithm>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

std::string_view to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::Activations: return "activations";
    case PayloadKind::Labels: return "labels";
    case PayloadKind::ActivationGrads: return "activation_grads";
    case PayloadKind::ClientWeights: return "client_weights";
    case PayloadKind::AggregatedWeights: return "aggregated_weights";
    case PayloadKind::FullModel: return "full_model";
  }
  return "?";
}

void NetworkProfile::validate() const {
  if (!(uplink_bw > 0) || !(downlink_bw > 0) || !(latency >= 0)) {
    throw ConfigError("network bandwidths must be positive and latency non-negative");
  }
  wire().validate();
}

void ComputeProfile::validate() const {
  if (!(client_flops > 0) || !(server_flops > 0)) throw ConfigError("compute rates must be strictly positive");
}

void TrafficLedger::record(std::size_t client, Direction dir, PayloadKind kind, std::uint64_t bytes) {
  if (client >= per_client_.size()) per_client_.resize(client + 1);
  items_[static_cast<std::size_t>(dir)][static_cast<std::size_t>(kind)] += bytes;
  per_client_[client][static_cast<std::size_t>(dir)] += bytes;
}

std::uint64_t TrafficLedger::total(Direction dir) const {
  std::uint64_t s = 0;
  for (std::uint64_t v : items_[static_cast<std::size_t>(dir)]) s += v;
  return s;
}

std::uint64_t TrafficLedger::client_total(std::size_t client, Direction dir) const {
  return per_client_.at(client)[static_cast<std::size_t>(dir)];
}

TrafficLedger& TrafficLedger::operator+=(const TrafficLedger& other) {
  if (other.per_client_.size() > per_client_.size()) per_client_.resize(other.per_client_.size());
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t k = 0; k < kPayloadKinds; ++k) items_[d][k] += other.items_[d][k];
    for (std::size_t c = 0; c < other.per_client_.size(); ++c) per_client_[c][d] += other.per_client_[c][d];
  }
  return *this;
}

TrafficLedger fsl_round_bytes(std::span<const std::size_t> batches, std::size_t cut_width, std::size_t client_params,
                              const WireFormat& fmt, bool aggregate) {
  TrafficLedger ledger(batches.size());
  const std::uint64_t w = fmt.scalar_width;
  for (std::size_t n = 0; n < batches.size(); ++n) {
    const std::uint64_t b = batches[n];
    ledger.record(n, Direction::Uplink, PayloadKind::Activations, b * cut_width * w);
    ledger.record(n, Direction::Uplink, PayloadKind::Labels, b * fmt.label_width);
    ledger.record(n, Direction::Downlink, PayloadKind::ActivationGrads, b * cut_width * w);
    if (aggregate) {
      ledger.record(n, Direction::Uplink, PayloadKind::ClientWeights, client_params * w);
      ledger.record(n, Direction::Downlink, PayloadKind::AggregatedWeights, client_params * w);
    }
  }
  return ledger;
}

TrafficLedger fsl_round_bytes(std::size_t clients, std::size_t batch, std::size_t cut_width, std::size_t client_params,
                              std::size_t scalar_width, std::size_t label_width) {
  std::vector<std::size_t> batches(clients, batch);
  return fsl_round_bytes(batches, cut_width, client_params, WireFormat{scalar_width, label_width});
}

TrafficLedger fl_round_bytes(std::size_t clients, std::size_t full_params, std::size_t scalar_width) {
  TrafficLedger ledger(clients);
  for (std::size_t n = 0; n < clients; ++n) {
    ledger.record(n, Direction::Uplink, PayloadKind::FullModel, full_params * scalar_width);
    ledger.record(n, Direction::Downlink, PayloadKind::FullModel, full_params * scalar_width);
  }
  return ledger;
}

Tensor Channel::send(std::size_t client, Direction dir, PayloadKind kind, const Tensor& t) {
  Frame frame = encode_tensor(t, fmt_);
  ledger_->record(client, dir, kind, frame.size());
  bytes_sent_ += frame.size();
  return quantize_ ? decode_tensor(frame, t.shape(), fmt_) : t;
}

std::vector<int> Channel::send(std::size_t client, Direction dir, PayloadKind kind, std::span<const int> labels) {
  Frame frame = encode_labels(labels, fmt_);
  ledger_->record(client, dir, kind, frame.size());
  bytes_sent_ += frame.size();
  return decode_labels(frame, fmt_);
}

Params Channel::send(std::size_t client, Direction dir, PayloadKind kind, const Params& p) {
  Frame frame = encode_params(p, fmt_);
  ledger_->record(client, dir, kind, frame.size());
  bytes_sent_ += frame.size();
  return quantize_ ? decode_params(frame, p, fmt_) : p;
}

double simulate_round_time(const TrafficLedger& ledger, const NetworkProfile& profile, const ComputeTimes& compute) {
  return simulate_round_breakdown(ledger, profile, compute).total();
}

RoundTime simulate_round_breakdown(const TrafficLedger& ledger, const NetworkProfile& profile,
                                   const ComputeTimes& compute) {
  profile.validate();
  const std::size_t n = std::max(ledger.clients(), compute.client_seconds.size());
  double up = profile.latency, down = profile.latency, client = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (c < ledger.clients()) {
      up = std::max(up, static_cast<double>(ledger.client_total(c, Direction::Uplink)) / profile.uplink_bw +
                            profile.latency);
      down = std::max(down, static_cast<double>(ledger.client_total(c, Direction::Downlink)) / profile.downlink_bw +
                                profile.latency);
    }
    if (c < compute.client_seconds.size()) client = std::max(client, compute.client_seconds[c]);
  }
  return {up + down, compute.server_seconds + client};
}

double training_flops(std::span<const LayerSpec> layers, std::size_t samples, std::size_t timesteps) {
  double macs = 0.0;
  for (const LayerSpec& l : layers) {
    const double in = static_cast<double>(l.input_dim), out = static_cast<double>(l.output_dim);
    switch (l.kind) {
      case LayerKind::Lstm: macs += static_cast<double>(timesteps) * 4.0 * out * (in + out + 1.0); break;
      case LayerKind::Dense: macs += out * (in + 1.0); break;
      case LayerKind::Dropout: macs += out; break;
      case LayerKind::SoftmaxCrossEntropy: macs += 2.0 * out; break;
    }
  }
  return 3.0 * 2.0 * macs * static_cast<double>(samples);
}

double wall_clock_probe(const std::function<void()>& section) {
  const auto start = SectionTimer::Clock::now();
  section();
  return std::chrono::duration<double>(SectionTimer::Clock::now() - start).count();
}

double SectionTimer::seconds(const std::string& label) const {
  auto it = totals_.find(label);
  return it == totals_.end() ? 0.0 : it->second;
}

}  // namespace fsl
