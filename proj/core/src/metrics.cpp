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

#include "fsl/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsl/error.hpp"
#include "json.hpp"

namespace fsl {

namespace fs = std::filesystem;

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

std::string format_metrics_csv(std::span<const RoundRecord> records, bool zero_wall_time) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const RoundRecord& r : records) {
    out += std::to_string(r.round) + ',' + g9(r.train_loss) + ',' + g9(r.val_loss) + ',' + g9(r.val_accuracy) + ',' +
           std::to_string(r.bytes_uplink) + ',' + std::to_string(r.bytes_downlink) + ',' + g9(r.sim_time_s) + ',' +
           g9(zero_wall_time ? 0.0 : r.wall_time_s) + '\n';
  }
  return out;
}

void write_metrics_csv(std::span<const RoundRecord> records, const fs::path& path, bool zero_wall_time) {
  write_file(path, format_metrics_csv(records, zero_wall_time));
}

std::vector<RoundRecord> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw DataError(path.string() + ": unexpected header");
  std::vector<RoundRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 8) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 8 columns");
    try {
      RoundRecord r;
      r.round = std::stoull(cols[0]);
      r.train_loss = std::stod(cols[1]);
      r.val_loss = std::stod(cols[2]);
      r.val_accuracy = std::stod(cols[3]);
      r.bytes_uplink = std::stoull(cols[4]);
      r.bytes_downlink = std::stoull(cols[5]);
      r.sim_time_s = std::stod(cols[6]);
      r.wall_time_s = std::stod(cols[7]);
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

std::string format_manifest(const ExperimentConfig& cfg, std::string_view series) {
  nlohmann::ordered_json j;
  j["format"] = "fslsim-manifest/1";
  if (!series.empty()) j["series"] = std::string(series);
  j["seed"] = cfg.seed;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& key : config_keys()) c[key.key] = get_config_value(cfg, key.key);
  j["config"] = std::move(c);
  return j.dump(2) + "\n";
}

EmittedFiles emit_metrics(std::span<const RoundRecord> records, const ExperimentConfig& cfg, const fs::path& dir,
                          std::string_view series) {
  EmittedFiles files;
  files.metrics = dir / "metrics.csv";
  files.manifest = dir / "manifest.json";
  write_metrics_csv(records, files.metrics, cfg.deterministic);
  write_file(files.manifest, format_manifest(cfg, series));
  files.timing = dir / "timing.csv";
  std::string s = "round,sim_transfer_s,sim_compute_s,wall_time_s\n";
  for (const auto& r : records) {
    s += std::to_string(r.round) + ',' + g9(r.sim_transfer_s) + ',' + g9(r.sim_compute_s) + ',' + g9(r.wall_time_s) +
         '\n';
  }
  write_file(files.timing, s);
  return files;
}

}  // namespace fsl
