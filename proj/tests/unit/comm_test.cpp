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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "fsl/codec.hpp"
#include "fsl/comm_model.hpp"
#include "fsl/error.hpp"
#include "oracles.hpp"

namespace fsl {
namespace {

TEST(AnalyticBytes, ActivationPayloadExample) {
  const TrafficLedger l = fsl_round_bytes(1, 32, 100, 0, 4);
  EXPECT_EQ(l.item(Direction::Uplink, PayloadKind::Activations), 12800u);
  EXPECT_EQ(l.item(Direction::Downlink, PayloadKind::ActivationGrads), 12800u);
  EXPECT_EQ(l.item(Direction::Uplink, PayloadKind::Labels), 32u);
}

TEST(AnalyticBytes, MatchesIndependentCount) {
  for (std::size_t n : {1u, 3u, 5u}) {
    for (std::size_t b : {1u, 32u, 64u}) {
      const TrafficLedger l = fsl_round_bytes(n, b, 100, 44000, 4, 1);
      const oracle::WireBytes w = oracle::fsl_client_bytes(b, 100, 44000, 4, 1);
      EXPECT_EQ(l.total(Direction::Uplink), n * w.uplink);
      EXPECT_EQ(l.total(Direction::Downlink), n * w.downlink);
      for (std::size_t c = 0; c < n; ++c) EXPECT_EQ(l.client_total(c, Direction::Uplink), w.uplink);
    }
  }
}

TEST(AnalyticBytes, DoublingClientsDoublesTotals) {
  const TrafficLedger one = fsl_round_bytes(1, 32, 100, 44000, 4);
  const TrafficLedger two = fsl_round_bytes(2, 32, 100, 44000, 4);
  EXPECT_EQ(two.total(Direction::Uplink), 2 * one.total(Direction::Uplink));
  EXPECT_EQ(two.total(Direction::Downlink), 2 * one.total(Direction::Downlink));
}

TEST(AnalyticBytes, FullModelBothWays) {
  const TrafficLedger l = fl_round_bytes(1, 100000, 4);
  EXPECT_EQ(l.total(Direction::Uplink), 400000u);
  EXPECT_EQ(l.total(Direction::Downlink), 400000u);
  EXPECT_EQ(l.item(Direction::Uplink, PayloadKind::FullModel), 400000u);
}

TEST(AnalyticBytes, SplitSendsLessThanFullModelForDefaultArchitecture) {
  const ModelSpec spec = default_har_model(9);
  const std::size_t client = parameter_count(spec.client_layers());
  const std::size_t full = parameter_count(spec.all_layers());
  EXPECT_EQ(client, oracle::lstm_params(9, 100));
  EXPECT_EQ(full, oracle::lstm_params(9, 100) + oracle::dense_params(100, 100) + oracle::dense_params(100, 6));
  const TrafficLedger fsl = fsl_round_bytes(5, 32, spec.cut_width(), client, 4);
  const TrafficLedger fl = fl_round_bytes(5, full, 4);
  EXPECT_LT(fsl.total(Direction::Uplink), fl.total(Direction::Uplink));
  EXPECT_LT(fsl.total(Direction::Downlink), fl.total(Direction::Downlink));
}

TEST(AnalyticBytes, SkippedAggregationDropsWeights) {
  const std::vector<std::size_t> batches{8, 5};
  const TrafficLedger l = fsl_round_bytes(batches, 10, 777, WireFormat{}, false);
  EXPECT_EQ(l.item(Direction::Uplink, PayloadKind::ClientWeights), 0u);
  EXPECT_EQ(l.client_total(1, Direction::Uplink), 5u * 10 * 4 + 5);
}

TEST(Ledger, ClientTotalsSumToDirectionTotals) {
  TrafficLedger l(3);
  l.record(0, Direction::Uplink, PayloadKind::Activations, 10);
  l.record(2, Direction::Uplink, PayloadKind::Labels, 7);
  l.record(1, Direction::Downlink, PayloadKind::ActivationGrads, 5);
  l.record(2, Direction::Downlink, PayloadKind::AggregatedWeights, 11);
  std::uint64_t up = 0, down = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    up += l.client_total(c, Direction::Uplink);
    down += l.client_total(c, Direction::Downlink);
  }
  EXPECT_EQ(up, l.total(Direction::Uplink));
  EXPECT_EQ(down, l.total(Direction::Downlink));
  EXPECT_EQ(up, 17u);
  TrafficLedger sum(3);
  sum += l;
  sum += l;
  EXPECT_EQ(sum.total(Direction::Downlink), 32u);
  EXPECT_EQ(sum.item(Direction::Uplink, PayloadKind::Labels), 14u);
}

NetworkProfile slow_profile() {
  NetworkProfile p;
  p.uplink_bw = 1000.0;
  p.downlink_bw = 2000.0;
  p.latency = 0.05;
  return p;
}

TEST(RoundTime, ZeroPayloadCostsTwoLatenciesPlusCompute) {
  const TrafficLedger l(2);
  const ComputeTimes c{{0.3, 0.7}, 0.2};
  EXPECT_DOUBLE_EQ(simulate_round_time(l, slow_profile(), c), 2 * 0.05 + 0.2 + 0.7);
}

TEST(RoundTime, SlowestClientBoundsEachLeg) {
  TrafficLedger l(2);
  l.record(0, Direction::Uplink, PayloadKind::Activations, 100);
  l.record(1, Direction::Uplink, PayloadKind::Activations, 500);
  l.record(0, Direction::Downlink, PayloadKind::ActivationGrads, 800);
  const RoundTime t = simulate_round_breakdown(l, slow_profile(), {{0.0, 0.0}, 0.0});
  EXPECT_DOUBLE_EQ(t.transfer, 0.5 + 0.05 + 0.4 + 0.05);
  EXPECT_DOUBLE_EQ(t.compute, 0.0);
}

TEST(RoundTime, DoublingBandwidthHalvesTransferPart) {
  const TrafficLedger l = fsl_round_bytes(5, 32, 100, 44000, 4);
  NetworkProfile base = slow_profile();
  base.latency = 0.0;
  NetworkProfile fast = base;
  fast.uplink_bw *= 2;
  fast.downlink_bw *= 2;
  const ComputeTimes none{{}, 0.0};
  EXPECT_DOUBLE_EQ(simulate_round_time(l, fast, none), simulate_round_time(l, base, none) / 2);
}

TEST(RoundTime, MonotoneInBytes) {
  double prev = 0.0;
  for (std::size_t b : {1u, 8u, 32u, 128u}) {
    const double t = simulate_round_time(fsl_round_bytes(5, b, 100, 44000, 4), NetworkProfile{}, {{}, 0.0});
    EXPECT_GT(t, prev);
    prev = t;
  }
}

TEST(RoundTime, InvalidProfileRejected) {
  NetworkProfile p;
  p.uplink_bw = 0.0;
  EXPECT_THROW(simulate_round_time(TrafficLedger(1), p, {}), ConfigError);
  p = NetworkProfile{};
  p.latency = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Flops, CountsLstmAndDenseTerms) {
  const ModelSpec spec = default_har_model(9);
  const double lstm = 128.0 * 4 * 100 * (9 + 100 + 1);
  EXPECT_DOUBLE_EQ(training_flops(spec.client_layers(), 1, 128), 6.0 * (lstm + 100));
  EXPECT_DOUBLE_EQ(training_flops(spec.client_layers(), 32, 128), 32 * training_flops(spec.client_layers(), 1, 128));
}

TEST(Codec, Float32FrameIsLittleEndian) {
  const std::vector<double> v{1.0, -2.5};
  const Frame f = encode_scalars(v, WireFormat{});
  ASSERT_EQ(f.size(), 8u);
  EXPECT_EQ(f[0], 0x00);
  EXPECT_EQ(f[3], 0x3f);
  EXPECT_EQ(f[7], 0xc0);
  EXPECT_EQ(decode_scalars(f, WireFormat{}), v);
}

TEST(Codec, Float64RoundTripIsExactAndFloat32IsNearest) {
  Tensor t({3, 2});
  const double vals[] = {0.1, -1e-30, 3.0e38, 1.0 / 3.0, 0.0, -7.25};
  for (std::size_t i = 0; i < 6; ++i) t[i] = vals[i];
  WireFormat f64{8, 1};
  EXPECT_EQ(decode_tensor(encode_tensor(t, f64), t.shape(), f64), t);
  const Tensor q = decode_tensor(encode_tensor(t, WireFormat{}), t.shape(), WireFormat{});
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(q[i], static_cast<double>(static_cast<float>(vals[i])));
}

TEST(Codec, FrameSizeMustMatchShape) {
  const Frame f(12, 0);
  EXPECT_THROW(decode_tensor(f, {2, 2}, WireFormat{}), Error);
  EXPECT_THROW(decode_scalars(Frame(7, 0), WireFormat{}), ProtocolError);
}

TEST(Codec, LabelsRoundTripAndRangeChecked) {
  const std::vector<int> y{0, 5, 3, 255};
  EXPECT_EQ(decode_labels(encode_labels(y, WireFormat{}), WireFormat{}), y);
  const std::vector<int> big{256};
  EXPECT_THROW(encode_labels(big, WireFormat{}), ProtocolError);
  WireFormat wide{4, 2};
  EXPECT_EQ(decode_labels(encode_labels(big, wide), wide), big);
}

TEST(Codec, BadWidthsRejected) {
  EXPECT_THROW((WireFormat{3, 1}.validate()), ConfigError);
  EXPECT_THROW((WireFormat{4, 3}.validate()), ConfigError);
}

TEST(Channel, BooksExactFrameSizes) {
  TrafficLedger l(2);
  Channel ch(WireFormat{}, l);
  Tensor a({4, 3}, 0.1);
  const Tensor got = ch.send(1, Direction::Uplink, PayloadKind::Activations, a);
  EXPECT_EQ(got, a);
  const std::vector<int> y{1, 2, 3, 4};
  EXPECT_EQ(ch.send(1, Direction::Uplink, PayloadKind::Labels, std::span<const int>(y)), y);
  EXPECT_EQ(l.client_total(1, Direction::Uplink), 4u * 3 * 4 + 4);
  EXPECT_EQ(l.client_total(0, Direction::Uplink), 0u);
  EXPECT_EQ(ch.bytes_sent(), 52u);
}

TEST(Channel, QuantizedDeliveryRoundsToFloat32) {
  TrafficLedger l(1);
  Channel ch(WireFormat{}, l, true);
  Tensor a({1}, 0.1);
  EXPECT_EQ(ch.send(0, Direction::Downlink, PayloadKind::ActivationGrads, a)[0], static_cast<double>(0.1f));
}

TEST(Timing, ProbeOfEmptySectionIsTiny) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, wall_clock_probe([] {}));
  EXPECT_GE(worst, 0.0);
  EXPECT_LT(worst, 1e-3);
}

TEST(Timing, ProbeSeesSleep) {
  const double t = wall_clock_probe([] { std::this_thread::sleep_for(std::chrono::milliseconds(20)); });
  EXPECT_GE(t, 0.019);
}

TEST(Timing, NestedScopesAccumulate) {
  SectionTimer timer;
  {
    auto outer = timer.probe("outer");
    for (int i = 0; i < 3; ++i) {
      auto inner = timer.probe("inner");
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  }
  EXPECT_GE(timer.seconds("inner"), 0.006);
  EXPECT_GE(timer.seconds("outer"), timer.seconds("inner"));
  EXPECT_EQ(timer.seconds("absent"), 0.0);
  EXPECT_EQ(timer.totals().size(), 2u);
}

}  // namespace
}  // namespace fsl
