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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsl/config.hpp"
#include "fsl/error.hpp"
#include "fsl/metrics.hpp"
#include "fsl/presets.hpp"

namespace fsl {
namespace {

namespace fs = std::filesystem;

std::string config_error(std::string_view text, const Overrides& ov = {}) {
  try {
    parse_config_text(text, "test.cfg", ov);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, EmptyTextGivesDefaults) {
  const ExperimentConfig c = parse_config_text("", "empty");
  EXPECT_EQ(c.mode, TrainMode::Fsl);
  EXPECT_EQ(c.rounds, 100u);
  EXPECT_EQ(c.clients, 5u);
  EXPECT_EQ(c.batch, 32u);
  EXPECT_DOUBLE_EQ(c.eta_c, 0.01);
  EXPECT_DOUBLE_EQ(c.eta_s, 0.01);
  EXPECT_FALSE(c.dp.enabled);
  EXPECT_DOUBLE_EQ(c.dp.H, 1.0);
  EXPECT_DOUBLE_EQ(c.dp.z, 1.0);
  EXPECT_EQ(c.model_cut_index, 2u);
  EXPECT_EQ(c.sensors, SensorSelection::Both);
  EXPECT_EQ(parse_config({}).rounds, 100u);
}

TEST(Config, KeyValueSyntax) {
  const ExperimentConfig c = parse_config_text("# comment\nmode = fl\n\nrounds=7   # trailing\nbatch = 16\n", "kv");
  EXPECT_EQ(c.mode, TrainMode::Fl);
  EXPECT_EQ(c.rounds, 7u);
  EXPECT_EQ(c.batch, 16u);
  EXPECT_NE(config_error("rounds\n").find("test.cfg:1: expected 'key = value'"), std::string::npos);
}

TEST(Config, OverridesWinOverFile) {
  const ExperimentConfig c = parse_config_text("dp.epsilon = 50\nrounds = 3\n", "f", {{"dp.epsilon", "80"}});
  EXPECT_DOUBLE_EQ(c.dp.epsilon, 80.0);
  EXPECT_EQ(c.rounds, 3u);
  EXPECT_TRUE(c.dp.enabled);
}

TEST(Config, ExplicitDisableBeatsEpsilon) {
  const ExperimentConfig c = parse_config_text("dp.enabled = false\ndp.epsilon = 40\n", "f");
  EXPECT_FALSE(c.dp.enabled);
  EXPECT_DOUBLE_EQ(c.dp.epsilon, 40.0);
}

TEST(Config, BudgetAtOrBelowFloorNamesTheKey) {
  const std::string msg = config_error("dp.epsilon = 0.5\n");
  EXPECT_NE(msg.find("dp.epsilon"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dp.z"), std::string::npos) << msg;
  EXPECT_FALSE(config_error("dp.epsilon = 1\n").empty());
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_NE(config_error("foo = 1\n").find("unknown config key 'foo'"), std::string::npos);
  EXPECT_NE(config_error("rounds = many\n").find("rounds"), std::string::npos);
  EXPECT_NE(config_error("mode = gossip\n").find("mode"), std::string::npos);
  EXPECT_FALSE(config_error("clients = 0\n").empty());
  EXPECT_FALSE(config_error("batch = 0\n").empty());
  EXPECT_FALSE(config_error("dp.H = 0\n").empty());
}

TEST(Config, KeyValueTextRoundTrips) {
  const ExperimentConfig c = parse_config_text("mode = fl\ndp.epsilon = 40\nseed = 99\nnet.latency = 0.02\n", "f");
  const ExperimentConfig back = parse_config_text(to_key_value_text(c), "again");
  EXPECT_EQ(resolved_values(back), resolved_values(c));
}

TEST(Config, EveryKeyReadsBack) {
  const ExperimentConfig c;
  for (const ConfigKey& k : config_keys()) {
    ExperimentConfig copy = c;
    if (k.key == "dp.epsilon") set_config_value(copy, "dp.enabled", "false");  // otherwise epsilon switches DP on
    set_config_value(copy, k.key, get_config_value(c, k.key));
    EXPECT_EQ(resolved_values(copy), resolved_values(c)) << k.key;
  }
}

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("fsl-config-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  static Overrides small() {
    return {{"synth.channels", "3"},         {"synth.timesteps", "6"},   {"synth.classes", "3"},
            {"synth.train_per_class", "10"}, {"synth.test_per_class", "4"}, {"model.hidden", "4"},
            {"model.dense_units", "4"},      {"clients", "2"},           {"batch", "4"}};
  }
  ExperimentConfig small_config(std::size_t rounds) {
    Overrides ov = small();
    ov.emplace_back("rounds", std::to_string(rounds));
    ov.emplace_back("deterministic", "true");
    ov.emplace_back("out", dir.string());
    return parse_config_text("", "small", ov);
  }

  fs::path dir;
};

TEST_F(Scratch, MetricsCsvHasHeaderAndOneRowPerRound) {
  const ExperimentConfig c = small_config(5);
  const auto records = run_experiment(c);
  ASSERT_EQ(records.size(), 5u);
  const EmittedFiles f = emit_metrics(records, c, dir);
  std::ifstream in(f.metrics);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], kMetricsHeader);
  EXPECT_EQ(lines[1].substr(0, 2), "1,");
  EXPECT_EQ(lines[1].substr(lines[1].size() - 2), ",0");

  const auto parsed = read_metrics_csv(f.metrics);
  ASSERT_EQ(parsed.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(parsed[i].round, records[i].round);
    EXPECT_EQ(parsed[i].bytes_uplink, records[i].bytes_uplink);
    EXPECT_NEAR(parsed[i].val_loss, records[i].val_loss, 1e-8 * std::abs(records[i].val_loss));
  }
  EXPECT_TRUE(fs::exists(f.timing));
  EXPECT_NE(slurp(f.timing).find("round,sim_transfer_s,sim_compute_s,wall_time_s"), std::string::npos);
}

TEST_F(Scratch, ManifestReplaysToIdenticalMetrics) {
  const ExperimentConfig c = small_config(3);
  const EmittedFiles first = emit_metrics(run_experiment(c), c, dir / "a");
  const ExperimentConfig replay = parse_config(first.manifest, {{"out", (dir / "b").string()}});
  EXPECT_EQ(replay.seed, c.seed);
  EXPECT_EQ(resolved_values(replay).at("rounds"), "3");
  const EmittedFiles second = emit_metrics(run_experiment(replay), replay, dir / "b");
  EXPECT_EQ(slurp(first.metrics), slurp(second.metrics));
}

TEST_F(Scratch, ZeroRoundsGivesHeaderOnly) {
  const ExperimentConfig c = small_config(0);
  const EmittedFiles f = emit_metrics(run_experiment(c), c, dir);
  EXPECT_EQ(slurp(f.metrics), std::string(kMetricsHeader) + "\n");
}

TEST(Presets, SeriesCountsAndRounds) {
  EXPECT_EQ(find_preset("fig2-dp-sweep").series.size(), 4u);
  EXPECT_EQ(find_preset("fig3-sensor-ablation").series.size(), 3u);
  EXPECT_EQ(find_preset("fig4-fsl-vs-fl").series.size(), 4u);
  const Preset& fig5 = find_preset("fig5-comm-time");
  ASSERT_EQ(fig5.series.size(), 2u);
  PresetOptions o;
  for (const PresetSeries& s : fig5.series) {
    const ExperimentConfig c = preset_config(fig5, s, o);
    EXPECT_EQ(c.rounds, 100u);
    EXPECT_FALSE(c.dp.enabled);
  }
  EXPECT_EQ(preset_config(fig5, fig5.series[0], o).mode, TrainMode::Fsl);
  EXPECT_EQ(preset_config(fig5, fig5.series[1], o).mode, TrainMode::Fl);
}

TEST(Presets, DpSweepCoversTheBudgets) {
  const Preset& p = find_preset("fig2-dp-sweep");
  PresetOptions o;
  EXPECT_FALSE(preset_config(p, p.series[0], o).dp.enabled);
  const double budgets[] = {80.0, 50.0, 40.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const ExperimentConfig c = preset_config(p, p.series[i + 1], o);
    EXPECT_TRUE(c.dp.enabled);
    EXPECT_DOUBLE_EQ(c.dp.epsilon, budgets[i]);
  }
}

TEST(Presets, UnknownNameListsKnownOnes) {
  try {
    find_preset("fig9");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fig2-dp-sweep"), std::string::npos);
  }
}

TEST_F(Scratch, PresetRunWritesEverySeries) {
  PresetOptions o;
  o.out_dir = dir;
  o.extra = small();
  o.extra.emplace_back("rounds", "2");
  const auto results = run_preset("fig2-dp-sweep", o);
  ASSERT_EQ(results.size(), 4u);
  for (const SeriesResult& r : results) {
    EXPECT_EQ(r.records.size(), 2u);
    EXPECT_TRUE(fs::exists(dir / "fig2-dp-sweep" / r.name / "metrics.csv")) << r.name;
    EXPECT_TRUE(fs::exists(dir / "fig2-dp-sweep" / r.name / "manifest.json")) << r.name;
  }
}

TEST_F(Scratch, MissingDatasetWithoutFallbackIsAnError) {
  PresetOptions o;
  o.out_dir = dir;
  o.data_path = dir / "nowhere";
  o.allow_synthetic_fallback = false;
  EXPECT_THROW(run_preset("fig2-dp-sweep", o), ConfigError);
}

}  // namespace
}  // namespace fsl
