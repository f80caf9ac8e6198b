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

#include "fsl/har_dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "fsl/error.hpp"

namespace fsl {

namespace fs = std::filesystem;

std::string_view to_string(SensorSelection s) {
  switch (s) {
    case SensorSelection::Both: return "both";
    case SensorSelection::AccelOnly: return "accel";
    case SensorSelection::GyroOnly: return "gyro";
    case SensorSelection::BodyAccelOnly: return "body-accel";
  }
  return "?";
}

SensorSelection parse_sensor_selection(std::string_view text) {
  if (text == "both") return SensorSelection::Both;
  if (text == "accel") return SensorSelection::AccelOnly;
  if (text == "gyro") return SensorSelection::GyroOnly;
  if (text == "body-accel") return SensorSelection::BodyAccelOnly;
  throw ConfigError("unknown sensor selection '" + std::string(text) + "' (expected both|accel|gyro|body-accel)");
}

std::vector<std::string> selected_channels(SensorSelection s) {
  std::vector<std::string> out;
  for (std::string_view name : kUciChannels) {
    const bool body_acc = name.starts_with("body_acc");
    const bool total_acc = name.starts_with("total_acc");
    const bool gyro = name.starts_with("body_gyro");
    bool keep = false;
    switch (s) {
      case SensorSelection::Both: keep = true; break;
      case SensorSelection::AccelOnly: keep = body_acc || total_acc; break;
      case SensorSelection::GyroOnly: keep = gyro; break;
      case SensorSelection::BodyAccelOnly: keep = body_acc; break;
    }
    if (keep) out.emplace_back(name);
  }
  return out;
}

Tensor HarDataset::gather_windows(std::span<const std::size_t> indices) const {
  const std::size_t per = timesteps() * channels();
  std::vector<double> data;
  data.reserve(indices.size() * per);
  auto src = windows.data();
  for (std::size_t i : indices) {
    if (i >= size()) throw DataError("sample index " + std::to_string(i) + " out of range");
    auto first = src.begin() + static_cast<std::ptrdiff_t>(i * per);
    data.insert(data.end(), first, first + static_cast<std::ptrdiff_t>(per));
  }
  return Tensor({indices.size(), timesteps(), channels()}, std::move(data));
}

std::vector<int> HarDataset::gather_labels(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(labels.at(i));
  return out;
}

HarDataset HarDataset::subset(std::span<const std::size_t> indices) const {
  HarDataset out;
  out.windows = gather_windows(indices);
  out.labels = gather_labels(indices);
  out.subject_ids.reserve(indices.size());
  for (std::size_t i : indices) out.subject_ids.push_back(subject_ids.at(i));
  out.channel_names = channel_names;
  out.num_classes = num_classes;
  return out;
}

std::vector<int> HarDataset::distinct_subjects() const {
  std::set<int> s(subject_ids.begin(), subject_ids.end());
  return {s.begin(), s.end()};
}

void HarDataset::validate() const {
  if (windows.rank() != 3) throw DataError("windows must be [n x steps x channels], got " + to_string(windows.shape()));
  if (windows.dim(0) != labels.size() || labels.size() != subject_ids.size()) {
    throw DataError("window/label/subject counts disagree: " + std::to_string(windows.dim(0)) + "/" +
                    std::to_string(labels.size()) + "/" + std::to_string(subject_ids.size()));
  }
  if (channel_names.size() != windows.dim(2)) throw DataError("channel name count does not match channel dim");
  for (int y : labels) {
    if (y < 0 || y >= static_cast<int>(num_classes)) throw DataError("label " + std::to_string(y) + " out of range");
  }
}

namespace {

struct Line {
  std::size_t number;  // 1-based position in the file, blank lines included
  std::string text;
};

// Non-blank lines with their file positions.
std::vector<Line> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::vector<Line> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back({number, std::move(line)});
  }
  return lines;
}

// Appends the whitespace-separated decimals of one line; returns how many were parsed.
std::size_t parse_floats(const std::string& line, const fs::path& path, std::size_t line_no, std::vector<double>& out) {
  const char* p = line.data();
  const char* end = p + line.size();
  std::size_t count = 0;
  while (true) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p >= end) break;
    double v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
      const std::size_t col = static_cast<std::size_t>(p - line.data()) + 1;
      throw DataError(path.string() + ":" + std::to_string(line_no) + ":" + std::to_string(col) +
                      ": not a decimal number");
    }
    if (!std::isfinite(v)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
    }
    out.push_back(v);
    ++count;
    p = next;
  }
  return count;
}

std::vector<int> read_ints(const fs::path& path) {
  std::vector<int> out;
  for (const auto& [line_no, line] : read_lines(path)) {
    const char* b = line.data() + line.find_first_not_of(" \t");
    const char* e = line.data() + line.size();
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
    int v = 0;
    auto [next, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || next != e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected one integer");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

HarDataset load_uci_split(const fs::path& root, std::string_view split, SensorSelection selection) {
  const std::string s(split);
  const fs::path dir = root / s;
  const fs::path signals = dir / "Inertial Signals";

  std::vector<std::vector<double>> channel_data;
  std::size_t windows = 0;
  for (std::size_t c = 0; c < kUciChannels.size(); ++c) {
    const fs::path file = signals / (std::string(kUciChannels[c]) + "_" + s + ".txt");
    std::vector<double> values;
    const auto lines = read_lines(file);
    values.reserve(lines.size() * kUciTimesteps);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::size_t got = parse_floats(lines[i].text, file, lines[i].number, values);
      if (got != kUciTimesteps) {
        throw DataError(file.string() + ":" + std::to_string(lines[i].number) + ": expected " + std::to_string(kUciTimesteps) +
                        " values, got " + std::to_string(got));
      }
    }
    if (c == 0) {
      windows = lines.size();
    } else if (lines.size() != windows) {
      throw DataError(file.string() + ": " + std::to_string(lines.size()) + " windows, but " +
                      std::string(kUciChannels[0]) + " has " + std::to_string(windows));
    }
    channel_data.push_back(std::move(values));
  }

  std::vector<int> labels = read_ints(dir / ("y_" + s + ".txt"));
  std::vector<int> subjects = read_ints(dir / ("subject_" + s + ".txt"));
  if (labels.size() != windows) {
    throw DataError((dir / ("y_" + s + ".txt")).string() + ": " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(windows) + " windows");
  }
  if (subjects.size() != windows) {
    throw DataError((dir / ("subject_" + s + ".txt")).string() + ": " + std::to_string(subjects.size()) +
                    " subject ids for " + std::to_string(windows) + " windows");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > static_cast<int>(kUciClasses)) {
      throw DataError((dir / ("y_" + s + ".txt")).string() + ":" + std::to_string(i + 1) + ": label " +
                      std::to_string(labels[i]) + " outside 1..6");
    }
    labels[i] -= 1;
  }

  const std::size_t nch = kUciChannels.size();
  std::vector<double> stacked(windows * kUciTimesteps * nch);
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t t = 0; t < kUciTimesteps; ++t)
      for (std::size_t c = 0; c < nch; ++c)
        stacked[(w * kUciTimesteps + t) * nch + c] = channel_data[c][w * kUciTimesteps + t];

  HarDataset all;
  all.windows = Tensor({windows, kUciTimesteps, nch}, std::move(stacked));
  all.labels = std::move(labels);
  all.subject_ids = std::move(subjects);
  all.channel_names.assign(kUciChannels.begin(), kUciChannels.end());
  all.num_classes = kUciClasses;
  return select_channels(all, selection);
}

HarSplits load_uci_har(const fs::path& root, SensorSelection selection) {
  return {load_uci_split(root, "train", selection), load_uci_split(root, "test", selection)};
}

void write_uci_split(const HarDataset& data, const fs::path& root, std::string_view split, int precision) {
  data.validate();
  const std::string s(split);
  const fs::path dir = root / s;
  const fs::path signals = dir / "Inertial Signals";
  std::error_code ec;
  fs::create_directories(signals, ec);
  if (ec) throw DataError("cannot create " + signals.string() + ": " + ec.message());

  auto open = [](const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
  };
  const std::size_t steps = data.timesteps(), nch = data.channels();
  char buf[64];
  for (std::size_t c = 0; c < nch; ++c) {
    auto out = open(signals / (data.channel_names[c] + "_" + s + ".txt"));
    for (std::size_t w = 0; w < data.size(); ++w) {
      for (std::size_t t = 0; t < steps; ++t) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, data.windows[(w * steps + t) * nch + c]);
        out << (t == 0 ? "" : " ") << buf;
      }
      out << '\n';
    }
  }
  auto y = open(dir / ("y_" + s + ".txt"));
  for (int label : data.labels) y << label + 1 << '\n';
  auto subj = open(dir / ("subject_" + s + ".txt"));
  for (int id : data.subject_ids) subj << id << '\n';
}

HarDataset select_channels(const HarDataset& data, SensorSelection selection) {
  const auto wanted = selected_channels(selection);
  std::vector<std::size_t> cols;
  for (const std::string& name : wanted) {
    auto it = std::find(data.channel_names.begin(), data.channel_names.end(), name);
    if (it == data.channel_names.end()) throw DataError("dataset lacks channel " + name);
    cols.push_back(static_cast<std::size_t>(it - data.channel_names.begin()));
  }
  const std::size_t n = data.size(), steps = data.timesteps(), nch = data.channels();
  std::vector<double> out(n * steps * cols.size());
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t j = 0; j < cols.size(); ++j)
        out[(w * steps + t) * cols.size() + j] = data.windows[(w * steps + t) * nch + cols[j]];
  HarDataset res;
  res.windows = Tensor({n, steps, cols.size()}, std::move(out));
  res.labels = data.labels;
  res.subject_ids = data.subject_ids;
  res.channel_names = wanted;
  res.num_classes = data.num_classes;
  return res;
}

HarDataset apply_normalization(const HarDataset& data, const NormStats& stats) {
  const std::size_t nch = data.channels();
  if (stats.mean.size() != nch || stats.stddev.size() != nch) {
    throw DataError("normalization stats cover " + std::to_string(stats.mean.size()) + " channels, data has " +
                    std::to_string(nch));
  }
  HarDataset out = data;
  auto v = out.windows.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t c = i % nch;
    // Channels that were constant in training carry no signal.
    v[i] = stats.stddev[c] <= kStdFloor ? 0.0 : (v[i] - stats.mean[c]) / stats.stddev[c];
  }
  return out;
}

NormalizedSplits normalize(const HarDataset& train, const HarDataset& test) {
  if (train.size() == 0) throw DataError("cannot normalize an empty training split");
  const std::size_t nch = train.channels();
  NormStats stats{std::vector<double>(nch, 0.0), std::vector<double>(nch, 0.0)};
  auto v = train.windows.data();
  const double count = static_cast<double>(v.size() / nch);
  for (std::size_t i = 0; i < v.size(); ++i) stats.mean[i % nch] += v[i];
  for (double& m : stats.mean) m /= count;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - stats.mean[i % nch];
    stats.stddev[i % nch] += d * d;
  }
  for (double& s : stats.stddev) s = std::max(std::sqrt(s / count), kStdFloor);
  return {apply_normalization(train, stats), apply_normalization(test, stats), stats};
}

}  // namespace fsl
