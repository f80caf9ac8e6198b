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

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsl/codec.hpp"
#include "fsl/model_spec.hpp"
#include "fsl/params.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

enum class Direction { Uplink = 0, Downlink = 1 };

enum class PayloadKind {
  Activations = 0,
  Labels,
  ActivationGrads,
  ClientWeights,
  AggregatedWeights,
  FullModel,
};
inline constexpr std::size_t kPayloadKinds = 6;

std::string_view to_string(PayloadKind kind);

struct NetworkProfile {
  double uplink_bw = 2.5e6;    // bytes/s
  double downlink_bw = 5.0e6;  // bytes/s
  double latency = 0.01;       // seconds per message leg
  std::size_t scalar_width = 4;
  std::size_t label_width = 1;

  WireFormat wire() const { return {scalar_width, label_width}; }
  void validate() const;
};

/// Byte counts of one round, itemized by direction, payload kind, and client.
class TrafficLedger {
 public:
  explicit TrafficLedger(std::size_t clients = 0) : per_client_(clients) {}

  void record(std::size_t client, Direction dir, PayloadKind kind, std::uint64_t bytes);

  std::uint64_t item(Direction dir, PayloadKind kind) const {
    return items_[static_cast<std::size_t>(dir)][static_cast<std::size_t>(kind)];
  }
  std::uint64_t total(Direction dir) const;
  std::uint64_t client_total(std::size_t client, Direction dir) const;
  std::size_t clients() const noexcept { return per_client_.size(); }

  TrafficLedger& operator+=(const TrafficLedger& other);
  bool operator==(const TrafficLedger&) const = default;

 private:
  std::array<std::array<std::uint64_t, kPayloadKinds>, 2> items_{};
  std::vector<std::array<std::uint64_t, 2>> per_client_;
};

/// Analytic FSL traffic: per client, uplink b*q*w + b*w_label + u*w and
/// downlink b*q*w + u*w.
TrafficLedger fsl_round_bytes(std::size_t clients, std::size_t batch, std::size_t cut_width,
                              std::size_t client_params, std::size_t scalar_width, std::size_t label_width = 1);
/// Unequal per-client batch sizes; the aggregation rounds flag drops weight traffic.
TrafficLedger fsl_round_bytes(std::span<const std::size_t> batches, std::size_t cut_width, std::size_t client_params,
                              const WireFormat& fmt, bool aggregate = true);

/// Analytic FL traffic: the full model both ways per client.
TrafficLedger fl_round_bytes(std::size_t clients, std::size_t full_params, std::size_t scalar_width);

/// Serializes each payload with the codec and books its exact size in a ledger.
/// Delivery is lossless by default; with `quantize` the receiver gets the
/// decoded wire values instead.
class Channel {
 public:
  Channel(WireFormat fmt, TrafficLedger& ledger, bool quantize = false)
      : fmt_(fmt), ledger_(&ledger), quantize_(quantize) {}

  Tensor send(std::size_t client, Direction dir, PayloadKind kind, const Tensor& t);
  std::vector<int> send(std::size_t client, Direction dir, PayloadKind kind, std::span<const int> labels);
  Params send(std::size_t client, Direction dir, PayloadKind kind, const Params& p);

  std::uint64_t bytes_sent() const noexcept { return bytes_sent_; }

 private:
  WireFormat fmt_;
  TrafficLedger* ledger_;
  bool quantize_;
  std::uint64_t bytes_sent_ = 0;
};

struct ComputeTimes {
  std::vector<double> client_seconds;  // one per client
  double server_seconds = 0.0;
};

/// Two-barrier round: slowest uplink leg + server compute + slowest downlink
/// leg + slowest client compute. Each leg pays the message latency once.
double simulate_round_time(const TrafficLedger& ledger, const NetworkProfile& profile, const ComputeTimes& compute);

struct RoundTime {
  double transfer = 0.0;
  double compute = 0.0;
  double total() const { return transfer + compute; }
};
RoundTime simulate_round_breakdown(const TrafficLedger& ledger, const NetworkProfile& profile,
                                   const ComputeTimes& compute);

/// Rates for the analytic compute model, in floating-point ops per second.
struct ComputeProfile {
  double client_flops = 2.0e9;
  double server_flops = 5.0e10;
  void validate() const;
};

/// Forward + backward flop estimate (2 flops per multiply-add, backward twice forward).
double training_flops(std::span<const LayerSpec> layers, std::size_t samples, std::size_t timesteps);

/// Monotonic wall-clock seconds spent in `section`.
double wall_clock_probe(const std::function<void()>& section);

/// Named section timer; scopes accumulate into per-label totals.
class SectionTimer {
 public:
  using Clock = std::chrono::steady_clock;

  class Scope {
   public:
    Scope(SectionTimer& owner, std::string label) : owner_(&owner), label_(std::move(label)), start_(Clock::now()) {}
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    ~Scope() { owner_->add(label_, std::chrono::duration<double>(Clock::now() - start_).count()); }

   private:
    SectionTimer* owner_;
    std::string label_;
    Clock::time_point start_;
  };

  Scope probe(std::string label) { return Scope(*this, std::move(label)); }
  void add(const std::string& label, double seconds) { totals_[label] += seconds; }
  double seconds(const std::string& label) const;
  const std::map<std::string, double>& totals() const noexcept { return totals_; }

 private:
  std::map<std::string, double> totals_;
};

}  // namespace fsl
