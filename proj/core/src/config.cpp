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

#include "fsl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "fsl/error.hpp"

namespace fsl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void type_error(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " +
                    std::string(expected));
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) type_error(key, v, "a nonnegative integer");
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) { return static_cast<std::size_t>(to_u64(key, v)); }

double to_double(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "infinity") return INFINITY;
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || std::isnan(out)) type_error(key, v, "a number");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  type_error(key, v, "a boolean");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename Enum, typename Parse>
Enum to_enum(std::string_view key, std::string_view v, Parse parse) {
  try {
    return parse(v);
  } catch (const ConfigError& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

Activation parse_activation(std::string_view v) {
  if (v == "none") return Activation::None;
  if (v == "tanh") return Activation::Tanh;
  if (v == "relu") return Activation::Relu;
  throw ConfigError("unknown activation '" + std::string(v) + "' (expected none|tanh|relu)");
}

DataSource parse_source(std::string_view v) {
  if (v == "synthetic") return DataSource::Synthetic;
  if (v == "uci-har") return DataSource::UciHar;
  throw ConfigError("unknown data source '" + std::string(v) + "' (expected synthetic|uci-har)");
}

CutGradient parse_cut_gradient(std::string_view v) {
  if (v == "per-client") return CutGradient::PerClientMean;
  if (v == "global") return CutGradient::GlobalMean;
  throw ConfigError("unknown cut gradient '" + std::string(v) + "' (expected per-client|global)");
}

struct Entry {
  ConfigKey info;
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define FSL_SIZE(name, field, help)                                                                   \
  Entry {                                                                                             \
    {name, help}, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.field = to_size(k, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                            \
  }
#define FSL_DOUBLE(name, field, help)                                                                   \
  Entry {                                                                                               \
    {name, help}, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); }                                         \
  }
#define FSL_BOOL(name, field, help)                                                                   \
  Entry {                                                                                             \
    {name, help}, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.field = to_bool(k, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); }                                       \
  }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      Entry{{"mode", "fsl | fl | centralized-oracle"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.mode = to_enum<TrainMode>(k, v, parse_train_mode); },
            [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }},
      FSL_SIZE("rounds", rounds, "training rounds T"),
      FSL_SIZE("clients", clients, "edge devices N"),
      FSL_SIZE("batch", batch, "per-client mini-batch b"),
      FSL_DOUBLE("eta_c", eta_c, "client-side learning rate"),
      FSL_DOUBLE("eta_s", eta_s, "server-side learning rate"),
      FSL_SIZE("local_epochs", local_epochs, "FL local epochs E"),
      Entry{{"seed", "root random seed"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = to_u64(k, v); },
            [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      FSL_BOOL("deterministic", deterministic, "run clients sequentially; wall times go to a sidecar"),
      Entry{{"out", "output directory"},
            [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out = std::string(v); },
            [](const ExperimentConfig& c) { return c.out; }},
      Entry{{"partition", "iid | by-subject"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.partition = to_enum<PartitionScheme>(k, v, parse_partition_scheme);
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.partition)); }},
      Entry{{"model.layers", "explicit layer list, e.g. lstm:100,dropout:0.5,dense:100:tanh,dense:6,softmax"},
            [](ExperimentConfig& c, std::string_view, std::string_view v) { c.model_layers = std::string(v); },
            [](const ExperimentConfig& c) { return c.model_layers; }},
      FSL_SIZE("model.hidden", model_hidden, "LSTM units"),
      FSL_SIZE("model.dense_units", model_dense_units, "server dense width"),
      Entry{{"model.dense_activation", "none | tanh | relu"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.model_dense_activation = to_enum<Activation>(k, v, parse_activation);
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.model_dense_activation)); }},
      FSL_DOUBLE("model.dropout", model_dropout, "client dropout rate"),
      FSL_BOOL("model.dropout_enabled", model_dropout_enabled, "false runs dropout in eval mode"),
      FSL_SIZE("model.cut_index", model_cut_index, "first server-side layer"),
      Entry{{"dp.enabled", "Gaussian noise on activations (defaults to on when dp.epsilon is given)"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.dp.enabled = to_bool(k, v);
              c.dp_enabled_set = true;
            },
            [](const ExperimentConfig& c) { return fmt(c.dp.enabled); }},
      Entry{{"dp.epsilon", "privacy budget epsilon"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.dp.epsilon = to_double(k, v);
              if (!c.dp_enabled_set) c.dp.enabled = true;
            },
            [](const ExperimentConfig& c) { return fmt(c.dp.epsilon); }},
      Entry{{"dp.H", "noise constant H"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dp.H = to_double(k, v); },
            [](const ExperimentConfig& c) { return fmt(c.dp.H); }},
      Entry{{"dp.z", "budget floor z"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dp.z = to_double(k, v); },
            [](const ExperimentConfig& c) { return fmt(c.dp.z); }},
      Entry{{"dp.clip", "per-row L2 clip bound (none = off)"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              if (v == "none" || v.empty()) {
                c.dp.clip_bound.reset();
              } else {
                c.dp.clip_bound = to_double(k, v);
              }
            },
            [](const ExperimentConfig& c) { return c.dp.clip_bound ? fmt(*c.dp.clip_bound) : std::string("none"); }},
      Entry{{"dp.alpha", "recorded alongside epsilon"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dp.alpha = to_double(k, v); },
            [](const ExperimentConfig& c) { return fmt(c.dp.alpha); }},
      Entry{{"data.source", "synthetic | uci-har"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.data_source = to_enum<DataSource>(k, v, parse_source); },
            [](const ExperimentConfig& c) {
              return std::string(c.data_source == DataSource::Synthetic ? "synthetic" : "uci-har");
            }},
      Entry{{"data.path", "UCI HAR Dataset root"},
            [](ExperimentConfig& c, std::string_view, std::string_view v) { c.data_path = std::string(v); },
            [](const ExperimentConfig& c) { return c.data_path; }},
      Entry{{"data.sensors", "both | accel | gyro | body-accel"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.sensors = to_enum<SensorSelection>(k, v, parse_sensor_selection);
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.sensors)); }},
      FSL_BOOL("data.normalize", data_normalize, "per-channel z-scoring from training statistics"),
      FSL_SIZE("synth.classes", synth.num_classes, "synthetic classes"),
      FSL_SIZE("synth.channels", synth.channels, "synthetic channels (9 uses UCI channel names)"),
      FSL_SIZE("synth.timesteps", synth.timesteps, "synthetic window length"),
      FSL_SIZE("synth.train_per_class", synth.samples_per_class, "synthetic training windows per class"),
      FSL_SIZE("synth.test_per_class", synth_test_per_class, "synthetic test windows per class"),
      FSL_DOUBLE("synth.noise_std", synth.noise_std, "synthetic additive noise"),
      FSL_SIZE("synth.subjects", synth.num_subjects, "synthetic subject count"),
      FSL_SIZE("synth.classes_per_subject", synth.classes_per_subject, "classes per subject (0 = all)"),
      FSL_DOUBLE("net.uplink_bw", network.uplink_bw, "bytes/s"),
      FSL_DOUBLE("net.downlink_bw", network.downlink_bw, "bytes/s"),
      FSL_DOUBLE("net.latency", network.latency, "seconds per message leg"),
      FSL_SIZE("net.scalar_width", network.scalar_width, "bytes per transmitted scalar"),
      FSL_SIZE("net.label_width", network.label_width, "bytes per transmitted label"),
      FSL_BOOL("net.quantize", net_quantize, "deliver decoded wire values"),
      FSL_DOUBLE("compute.client_flops", compute.client_flops, "edge device flop/s"),
      FSL_DOUBLE("compute.server_flops", compute.server_flops, "server flop/s"),
      Entry{{"fsl.cut_gradient", "per-client | global"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.cut_gradient = to_enum<CutGradient>(k, v, parse_cut_gradient);
            },
            [](const ExperimentConfig& c) {
              return std::string(c.cut_gradient == CutGradient::PerClientMean ? "per-client" : "global");
            }},
      Entry{{"fsl.aggregation", "after-update | before-update"},
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              c.aggregation = to_enum<AggregationOrder>(k, v, parse_aggregation_order);
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.aggregation)); }},
      FSL_SIZE("fsl.aggregate_every", aggregate_every, "aggregate client weights every k rounds"),
  };
  return entries;
}

#undef FSL_SIZE
#undef FSL_DOUBLE
#undef FSL_BOOL

const Entry& find_entry(std::string_view key) {
  for (const Entry& e : registry())
    if (e.info.key == key) return e;
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Entry& e : registry()) out.push_back(e.info);
    return out;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(key).set(cfg, key, trim(value));
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) { return find_entry(key).get(cfg); }

void ExperimentConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(clients >= 1, "config key 'clients' must be at least 1");
  need(batch >= 1, "config key 'batch' must be at least 1");
  need(local_epochs >= 1, "config key 'local_epochs' must be at least 1");
  need(eta_c >= 0 && std::isfinite(eta_c), "config key 'eta_c' must be finite and nonnegative");
  need(eta_s >= 0 && std::isfinite(eta_s), "config key 'eta_s' must be finite and nonnegative");
  need(model_hidden >= 1, "config key 'model.hidden' must be at least 1");
  need(model_dense_units >= 1, "config key 'model.dense_units' must be at least 1");
  need(model_dropout >= 0 && model_dropout < 1, "config key 'model.dropout' must be in [0, 1)");
  need(aggregate_every >= 1, "config key 'fsl.aggregate_every' must be at least 1");
  need(data_source != DataSource::UciHar || !data_path.empty(), "config key 'data.path' is required for uci-har");
  if (!(dp.H > 0)) throw ConfigError("config key 'dp.H' must be positive");
  if (dp.clip_bound && !(*dp.clip_bound > 0)) throw ConfigError("config key 'dp.clip' must be positive");
  if (dp.enabled && !(dp.epsilon > dp.z)) {
    throw ConfigError("config key 'dp.epsilon' = " + fmt(dp.epsilon) +
                      " must exceed dp.z = " + fmt(dp.z) + " (noise std H / sqrt(epsilon - z) is undefined)");
  }
  {
    const std::size_t channels = data_source == DataSource::UciHar || synth.channels == kUciChannels.size()
                                     ? selected_channels(sensors).size()
                                     : synth.channels;
    const std::size_t classes = data_source == DataSource::UciHar ? kUciClasses : synth.num_classes;
    build_model_spec(*this, channels, classes);
  }
  try {
    network.validate();
    compute.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config keys 'net.*'/'compute.*': ") + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text, std::string_view origin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view origin,
                                   const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig cfg;
  std::vector<std::pair<std::string, std::string>> pairs;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string(origin) + ": invalid manifest JSON: " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw ConfigError(std::string(origin) + ": manifest lacks a 'config' object");
    }
    for (const auto& [k, v] : j["config"].items()) {
      pairs.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    // dp.enabled is explicit in a manifest; apply it after epsilon.
    std::stable_partition(pairs.begin(), pairs.end(), [](const auto& p) { return p.first != "dp.enabled"; });
  } else {
    pairs = parse_key_values(text, origin);
  }
  for (const auto& [k, v] : pairs) set_config_value(cfg, k, v);
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& file,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (file.empty()) return parse_config_text("", "<defaults>", overrides);
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), file.string(), overrides);
}

std::map<std::string, std::string> resolved_values(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const Entry& e : registry()) out[e.info.key] = e.get(cfg);
  return out;
}

std::string to_key_value_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const Entry& e : registry()) {
    if (e.info.key == "dp.enabled") continue;
    out += e.info.key + " = " + e.get(cfg) + "\n";
  }
  out += "dp.enabled = " + fmt(cfg.dp.enabled) + "\n";
  return out;
}

ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
  ExperimentData d;
  if (cfg.data_source == DataSource::UciHar) {
    auto splits = load_uci_har(cfg.data_path, cfg.sensors);
    d.train = std::move(splits.train);
    d.test = std::move(splits.test);
  } else {
    Rng root(cfg.seed);
    Rng train_rng = root.fork(11);
    Rng test_rng = root.fork(12);
    SynthOptions test_opts = cfg.synth;
    test_opts.samples_per_class = cfg.synth_test_per_class;
    d.train = synth_dataset(cfg.synth, train_rng);
    d.test = synth_dataset(test_opts, test_rng);
    if (cfg.synth.channels == kUciChannels.size()) {
      d.train = select_channels(d.train, cfg.sensors);
      d.test = select_channels(d.test, cfg.sensors);
    } else if (cfg.sensors != SensorSelection::Both) {
      throw ConfigError("config key 'data.sensors': channel selection needs synth.channels = 9");
    }
  }
  // Selection happens first so statistics always match the kept channels.
  if (cfg.data_normalize) {
    auto norm = normalize(d.train, d.test);
    d.train = std::move(norm.train);
    d.test = std::move(norm.test);
  }
  return d;
}

ModelSpec build_model_spec(const ExperimentConfig& cfg, std::size_t channels, std::size_t classes) {
  ModelSpec spec;
  if (!cfg.model_layers.empty()) {
    spec = parse_layers(cfg.model_layers, channels, cfg.model_cut_index);
  } else {
    spec = default_har_model(channels, classes, cfg.model_hidden, cfg.model_dense_units, cfg.model_dropout,
                             cfg.model_dense_activation);
    spec.cut_index = cfg.model_cut_index;
  }
  spec.validate();
  if (spec.num_classes() != classes) {
    throw ConfigError("config key 'model.layers': output width " + std::to_string(spec.num_classes()) +
                      " does not match " + std::to_string(classes) + " classes");
  }
  return spec;
}

TrainOptions to_train_options(const ExperimentConfig& cfg, std::size_t channels, std::size_t classes) {
  TrainOptions o;
  o.mode = cfg.mode;
  o.spec = build_model_spec(cfg, channels, classes);
  o.rounds = cfg.rounds;
  o.clients = cfg.clients;
  o.eta_c = cfg.eta_c;
  o.eta_s = cfg.eta_s;
  o.dp = cfg.dp;
  o.partition = cfg.partition;
  o.seed = cfg.seed;
  o.aggregate_every = cfg.aggregate_every;
  o.round.batch = cfg.batch;
  o.round.dropout = cfg.model_dropout_enabled ? Mode::Train : Mode::Eval;
  o.round.cut_gradient = cfg.cut_gradient;
  o.round.order = cfg.aggregation;
  o.round.local_epochs = cfg.local_epochs;
  o.round.deterministic = cfg.deterministic;
  o.round.quantize_wire = cfg.net_quantize;
  o.round.network = cfg.network;
  o.round.compute = cfg.compute;
  return o;
}

}  // namespace fsl
