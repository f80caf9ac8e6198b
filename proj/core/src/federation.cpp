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

#include "fsl/federation.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::Fsl: return "fsl";
    case TrainMode::Fl: return "fl";
    case TrainMode::Centralized: return "centralized-oracle";
  }
  return "?";
}

TrainMode parse_train_mode(std::string_view text) {
  if (text == "fsl") return TrainMode::Fsl;
  if (text == "fl") return TrainMode::Fl;
  if (text == "centralized-oracle" || text == "centralized") return TrainMode::Centralized;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected fsl|fl|centralized-oracle)");
}

std::string_view to_string(AggregationOrder o) {
  return o == AggregationOrder::AfterUpdate ? "after-update" : "before-update";
}

AggregationOrder parse_aggregation_order(std::string_view text) {
  if (text == "after-update") return AggregationOrder::AfterUpdate;
  if (text == "before-update") return AggregationOrder::BeforeUpdate;
  throw ConfigError("unknown aggregation order '" + std::string(text) + "' (expected after-update|before-update)");
}

std::vector<std::size_t> BatchSampler::next(std::size_t batch) {
  if (batch == 0 || batch > population_) {
    throw ConfigError("batch of " + std::to_string(batch) + " from a local dataset of " +
                      std::to_string(population_));
  }
  if (order_.empty() || cursor_ + batch > order_.size()) {
    order_.resize(population_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    rng_.shuffle(order_);
    cursor_ = 0;
  }
  std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                               order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch));
  cursor_ += batch;
  return out;
}

std::vector<std::size_t> BatchSampler::epoch() {
  std::vector<std::size_t> order(population_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng_.shuffle(order);
  return order;
}

Params fedavg(std::span<const Params> weights) {
  std::vector<std::size_t> ids(weights.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return fedavg(weights, ids);
}

Params fedavg(std::span<const Params> weights, std::span<const std::size_t> ids) {
  if (weights.empty()) throw ConfigError("fedavg of an empty client list");
  if (ids.size() != weights.size()) throw DimensionError("fedavg: one id per weight set required");
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

  const Params& ref = weights[order.front()];
  for (const Params& w : weights) {
    if (!w.same_shapes(ref)) throw DimensionError("fedavg: client weight shapes differ");
  }
  // mean = ref + sum(w_i - ref) / N, which returns ref bit-exactly when all inputs agree.
  const auto base = ref.flatten();
  std::vector<double> acc(base.size(), 0.0);
  for (std::size_t idx : order) {
    const auto w = weights[idx].flatten();
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w[k] - base[k];
  }
  const double inv = 1.0 / static_cast<double>(weights.size());
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = base[k] + acc[k] * inv;
  Params out = ref;
  out.unflatten(acc);
  return out;
}

void split_rate_step(Params& full, const Params& grads, std::size_t cut_index, double eta_c, double eta_s) {
  auto [gc, gs] = split_params(grads, cut_index);
  auto [pc, ps] = split_params(full, cut_index);
  pc.sgd_step(gc, eta_c);
  ps.sgd_step(gs, eta_s);
  full = join_params(pc, ps);
}

namespace {

template <typename Fn>
void for_each_client(std::size_t n, bool deterministic, Fn&& fn) {
  if (deterministic || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> tasks;
  tasks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) tasks.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
  for (auto& t : tasks) t.get();
}

void check_clients(const std::vector<ClientState>& clients) {
  if (clients.empty()) throw ConfigError("a round needs at least one client");
}

std::size_t timesteps_of(const ClientState& c) { return c.data.windows.rank() == 3 ? c.data.timesteps() : 1; }

}  // namespace

ActivationUpload client_activation_stage(const ModelSpec& spec, ClientState& client, const RoundOptions& opts) {
  const auto batch = client.sampler.next(opts.batch);
  Tensor x = client.data.gather_windows(batch);
  Tensor s = client_forward(spec, client.params, x, client.cache, opts.dropout, &client.dropout_rng);
  return {client.id, apply_dp(s, client.dp, client.noise_rng), client.data.gather_labels(batch)};
}

ServerStep server_activation_stage(const ModelSpec& spec, ServerState& server, std::span<const ActivationUpload> uploads,
                                   CutGradient mode) {
  if (uploads.empty()) throw ConfigError("server received no activations");
  std::vector<std::size_t> order(uploads.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return uploads[a].client < uploads[b].client; });

  std::vector<Tensor> parts;
  std::vector<int> labels;
  std::vector<std::size_t> rows;
  for (std::size_t i : order) {
    parts.push_back(uploads[i].activations);
    labels.insert(labels.end(), uploads[i].labels.begin(), uploads[i].labels.end());
    rows.push_back(uploads[i].activations.dim(0));
  }
  Tensor pooled = concat_rows(parts);
  ServerStep step = server_forward_backward(spec, server.params, pooled, labels, rows, server.eta_s, mode, &server.rng);

  std::vector<Tensor> by_input(uploads.size());
  for (std::size_t k = 0; k < order.size(); ++k) by_input[order[k]] = std::move(step.cut_grads[k]);
  step.cut_grads = std::move(by_input);
  return step;
}

RoundRecord fsl_round(const ModelSpec& spec, std::vector<ClientState>& clients, ServerState& server,
                      const RoundOptions& opts, std::size_t round) {
  check_clients(clients);
  const auto start = SectionTimer::Clock::now();
  const std::size_t n = clients.size();
  TrafficLedger ledger(n);
  Channel channel(opts.network.wire(), ledger, opts.quantize_wire);

  // Edge devices: forward to the cut, perturb, transmit (S_n, y_n).
  std::vector<ActivationUpload> local(n);
  for_each_client(n, opts.deterministic, [&](std::size_t i) { local[i] = client_activation_stage(spec, clients[i], opts); });
  std::vector<ActivationUpload> received;
  received.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    received.push_back({local[i].client,
                        channel.send(i, Direction::Uplink, PayloadKind::Activations, local[i].activations),
                        channel.send(i, Direction::Uplink, PayloadKind::Labels, local[i].labels)});
  }

  // Server: pooled forward, loss, server update, per-client activation gradients.
  ServerStep step = server_activation_stage(spec, server, received, opts.cut_gradient);
  std::vector<Tensor> grads(n);
  for (std::size_t i = 0; i < n; ++i) {
    grads[i] = channel.send(i, Direction::Downlink, PayloadKind::ActivationGrads, step.cut_grads[i]);
  }

  auto aggregate = [&] {
    server.aggregation_buffer.clear();
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      server.aggregation_buffer.push_back(
          channel.send(i, Direction::Uplink, PayloadKind::ClientWeights, clients[i].params));
      ids.push_back(clients[i].id);
    }
    Params avg = fedavg(server.aggregation_buffer, ids);
    server.aggregation_buffer.clear();
    std::vector<Params> delivered;
    for (std::size_t i = 0; i < n; ++i) {
      delivered.push_back(channel.send(i, Direction::Downlink, PayloadKind::AggregatedWeights, avg));
    }
    return delivered;
  };

  if (opts.order == AggregationOrder::BeforeUpdate && opts.aggregate) {
    auto delivered = aggregate();
    for_each_client(n, opts.deterministic, [&](std::size_t i) {
      Params g = client_gradients(spec, clients[i].params, clients[i].cache, grads[i]);
      clients[i].params = std::move(delivered[i]);
      clients[i].params.sgd_step(g, clients[i].eta_c);
    });
  } else {
    for_each_client(n, opts.deterministic, [&](std::size_t i) {
      client_backward(spec, clients[i].params, clients[i].cache, grads[i], clients[i].eta_c);
    });
    if (opts.aggregate) {
      auto delivered = aggregate();
      for (std::size_t i = 0; i < n; ++i) clients[i].params = std::move(delivered[i]);
    }
  }

  RoundRecord rec;
  rec.round = round;
  rec.train_loss = step.loss;
  rec.train_accuracy = step.accuracy();
  rec.bytes_uplink = ledger.total(Direction::Uplink);
  rec.bytes_downlink = ledger.total(Direction::Downlink);

  ComputeTimes compute;
  for (const auto& c : clients) {
    compute.client_seconds.push_back(training_flops(spec.client_layers(), opts.batch, timesteps_of(c)) /
                                     opts.compute.client_flops);
  }
  const double agg_flops = opts.aggregate ? static_cast<double>(n * clients[0].params.size()) : 0.0;
  compute.server_seconds = (training_flops(spec.server_layers(), step.rows, 1) + agg_flops) / opts.compute.server_flops;
  const RoundTime rt = simulate_round_breakdown(ledger, opts.network, compute);
  rec.sim_time_s = rt.total();
  rec.sim_transfer_s = rt.transfer;
  rec.sim_compute_s = rt.compute;
  rec.ledger = std::move(ledger);
  rec.wall_time_s = std::chrono::duration<double>(SectionTimer::Clock::now() - start).count();
  return rec;
}

RoundRecord fl_round(const ModelSpec& spec, std::vector<ClientState>& clients, ServerState& server,
                     const RoundOptions& opts, std::size_t round) {
  check_clients(clients);
  const auto start = SectionTimer::Clock::now();
  const std::size_t n = clients.size();
  TrafficLedger ledger(n);
  Channel channel(opts.network.wire(), ledger, opts.quantize_wire);

  for (std::size_t i = 0; i < n; ++i) {
    clients[i].params = channel.send(i, Direction::Downlink, PayloadKind::FullModel, server.params);
  }

  std::vector<double> loss(n, 0.0), acc(n, 0.0);
  std::vector<std::size_t> samples_seen(n, 0);
  for_each_client(n, opts.deterministic, [&](std::size_t i) {
    ClientState& c = clients[i];
    if (opts.batch == 0 || opts.batch > c.data.size()) {
      throw ConfigError("batch of " + std::to_string(opts.batch) + " from a local dataset of " +
                        std::to_string(c.data.size()));
    }
    double loss_sum = 0.0;
    std::size_t correct = 0, steps = 0;
    for (std::size_t e = 0; e < opts.local_epochs; ++e) {
      const auto order = c.sampler.epoch();
      for (std::size_t off = 0; off < order.size(); off += opts.batch) {
        std::span<const std::size_t> idx(order.data() + off, std::min(opts.batch, order.size() - off));
        Tensor x = c.data.gather_windows(idx);
        auto y = c.data.gather_labels(idx);
        LossAndGrad lg = loss_and_gradients(spec.all_layers(), c.params, x, y, opts.dropout, &c.dropout_rng);
        split_rate_step(c.params, lg.grads, spec.cut_index, c.eta_c, c.eta_s);
        loss_sum += lg.loss;
        correct += lg.correct;
        samples_seen[i] += idx.size();
        ++steps;
      }
    }
    loss[i] = steps == 0 ? 0.0 : loss_sum / static_cast<double>(steps);
    acc[i] = samples_seen[i] == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(samples_seen[i]);
    if (c.dp.enabled) {
      const double sigma = calibrate_sigma(c.dp);
      auto flat = c.params.flatten();
      for (double& v : flat) v += sigma * c.noise_rng.normal();
      c.params.unflatten(flat);
    }
  });

  server.aggregation_buffer.clear();
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < n; ++i) {
    server.aggregation_buffer.push_back(channel.send(i, Direction::Uplink, PayloadKind::FullModel, clients[i].params));
    ids.push_back(clients[i].id);
  }
  server.params = fedavg(server.aggregation_buffer, ids);
  server.aggregation_buffer.clear();

  RoundRecord rec;
  rec.round = round;
  rec.train_loss = std::accumulate(loss.begin(), loss.end(), 0.0) / static_cast<double>(n);
  rec.train_accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(n);
  rec.bytes_uplink = ledger.total(Direction::Uplink);
  rec.bytes_downlink = ledger.total(Direction::Downlink);
  ComputeTimes compute;
  for (std::size_t i = 0; i < n; ++i) {
    compute.client_seconds.push_back(training_flops(spec.all_layers(), samples_seen[i], timesteps_of(clients[i])) /
                                     opts.compute.client_flops);
  }
  compute.server_seconds = static_cast<double>(n * server.params.size()) / opts.compute.server_flops;
  const RoundTime rt = simulate_round_breakdown(ledger, opts.network, compute);
  rec.sim_time_s = rt.total();
  rec.sim_transfer_s = rt.transfer;
  rec.sim_compute_s = rt.compute;
  rec.ledger = std::move(ledger);
  rec.wall_time_s = std::chrono::duration<double>(SectionTimer::Clock::now() - start).count();
  return rec;
}

RoundRecord centralized_round(const ModelSpec& spec, std::vector<ClientState>& clients, ServerState& server,
                              const RoundOptions& opts, std::size_t round) {
  check_clients(clients);
  const auto start = SectionTimer::Clock::now();
  std::vector<Tensor> xs;
  std::vector<int> ys;
  for (auto& c : clients) {
    const auto batch = c.sampler.next(opts.batch);
    xs.push_back(c.data.gather_windows(batch));
    const auto y = c.data.gather_labels(batch);
    ys.insert(ys.end(), y.begin(), y.end());
  }
  Tensor x = concat_rows(xs);
  LossAndGrad lg = loss_and_gradients(spec.all_layers(), server.params, x, ys, opts.dropout, &server.rng);
  split_rate_step(server.params, lg.grads, spec.cut_index, server.eta_c, server.eta_s);

  RoundRecord rec;
  rec.round = round;
  rec.train_loss = lg.loss;
  rec.train_accuracy = static_cast<double>(lg.correct) / static_cast<double>(ys.size());
  rec.ledger = TrafficLedger(clients.size());
  ComputeTimes compute;
  compute.server_seconds = training_flops(spec.all_layers(), ys.size(), timesteps_of(clients[0])) /
                           opts.compute.server_flops;
  const RoundTime rt = simulate_round_breakdown(rec.ledger, opts.network, compute);
  rec.sim_time_s = rt.total();
  rec.sim_transfer_s = rt.transfer;
  rec.sim_compute_s = rt.compute;
  rec.wall_time_s = std::chrono::duration<double>(SectionTimer::Clock::now() - start).count();
  return rec;
}

Evaluation evaluate(const ModelSpec& spec, const Params& client, const Params& server, const HarDataset& data) {
  if (data.size() == 0) throw DataError("cannot evaluate on an empty dataset");
  constexpr std::size_t kChunk = 512;
  auto server_body = spec.server_layers().first(spec.server_layers().size() - 1);
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t off = 0; off < data.size(); off += kChunk) {
    idx.resize(std::min(kChunk, data.size() - off));
    std::iota(idx.begin(), idx.end(), off);
    Tensor s = forward_layers(spec.client_layers(), client, data.gather_windows(idx), Mode::Eval, nullptr, nullptr);
    Tensor logits = forward_layers(server_body, server, s, Mode::Eval, nullptr, nullptr);
    XentResult r = softmax_xent_forward(logits, data.gather_labels(idx));
    loss_sum += r.loss * static_cast<double>(idx.size());
    correct += r.correct;
  }
  const double total = static_cast<double>(data.size());
  return {loss_sum / total, static_cast<double>(correct) / total};
}

Federation make_federation(const TrainOptions& opts, const HarDataset& train_data) {
  opts.spec.validate();
  opts.dp.validate();
  if (opts.clients == 0) throw ConfigError("clients must be at least 1");
  if (train_data.channels() != opts.spec.input_dim()) {
    throw ConfigError("model input width " + std::to_string(opts.spec.input_dim()) + " != data channels " +
                      std::to_string(train_data.channels()));
  }
  if (train_data.num_classes != opts.spec.num_classes()) {
    throw ConfigError("model has " + std::to_string(opts.spec.num_classes()) + " classes, data has " +
                      std::to_string(train_data.num_classes));
  }

  Rng root(opts.seed);
  Rng init_rng = root.fork(1);
  Params full = init_params(opts.spec.all_layers(), init_rng);
  auto [client_half, server_half] = split_params(full, opts.spec.cut_index);

  Rng part_rng = root.fork(2);
  const auto parts = partition_indices(train_data, opts.clients, opts.partition, part_rng);

  Federation fed;
  for (std::size_t n = 0; n < opts.clients; ++n) {
    ClientState c;
    c.id = n;
    c.data = train_data.subset(parts[n]);
    if (opts.round.batch > c.data.size()) {
      throw ConfigError("batch " + std::to_string(opts.round.batch) + " exceeds client " + std::to_string(n) +
                        "'s local dataset of " + std::to_string(c.data.size()));
    }
    c.dp = opts.dp;
    c.eta_c = opts.eta_c;
    c.eta_s = opts.eta_s;
    const Rng base = root.fork(1000 + n);
    c.sampler = BatchSampler(c.data.size(), base.fork(0));
    c.dropout_rng = base.fork(1);
    c.noise_rng = base.fork(2);
    c.params = opts.mode == TrainMode::Fsl ? client_half : (opts.mode == TrainMode::Fl ? full : Params());
    fed.clients.push_back(std::move(c));
  }
  fed.server.params = opts.mode == TrainMode::Fsl ? server_half : full;
  fed.server.eta_s = opts.eta_s;
  fed.server.eta_c = opts.eta_c;
  fed.server.rng = root.fork(3);
  return fed;
}

std::vector<RoundRecord> train(const TrainOptions& opts, const HarDataset& train_data, const HarDataset& validation,
                               const RoundCallback& on_round) {
  if (opts.aggregate_every == 0) throw ConfigError("fsl.aggregate_every must be at least 1");
  Federation fed = make_federation(opts, train_data);
  std::vector<RoundRecord> records;
  records.reserve(opts.rounds);
  std::vector<std::size_t> ids;
  for (const auto& c : fed.clients) ids.push_back(c.id);

  for (std::size_t t = 1; t <= opts.rounds; ++t) {
    RoundOptions ro = opts.round;
    ro.aggregate = (t % opts.aggregate_every) == 0;
    RoundRecord rec;
    Evaluation ev;
    switch (opts.mode) {
      case TrainMode::Fsl: {
        rec = fsl_round(opts.spec, fed.clients, fed.server, ro, t);
        std::vector<Params> cp;
        for (const auto& c : fed.clients) cp.push_back(c.params);
        ev = evaluate(opts.spec, fedavg(cp, ids), fed.server.params, validation);
        break;
      }
      case TrainMode::Fl:
      case TrainMode::Centralized: {
        rec = opts.mode == TrainMode::Fl ? fl_round(opts.spec, fed.clients, fed.server, ro, t)
                                         : centralized_round(opts.spec, fed.clients, fed.server, ro, t);
        auto [c, s] = split_params(fed.server.params, opts.spec.cut_index);
        ev = evaluate(opts.spec, c, s, validation);
        break;
      }
    }
    rec.val_loss = ev.loss;
    rec.val_accuracy = ev.accuracy;
    if (on_round) on_round(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace fsl
