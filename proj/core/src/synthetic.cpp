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

#include <cmath>
#include <numbers>

#include "fsl/error.hpp"
#include "fsl/har_dataset.hpp"

namespace fsl {

HarDataset synth_dataset(const SynthOptions& opts, Rng& rng) {
  if (opts.num_classes == 0 || opts.channels == 0 || opts.timesteps == 0 || opts.samples_per_class == 0) {
    throw ConfigError("synthetic dataset counts must all be at least 1");
  }
  if (opts.num_subjects == 0 || opts.classes_per_subject > opts.num_classes) {
    throw ConfigError("synthetic dataset needs num_subjects >= 1 and classes_per_subject <= num_classes");
  }
  const std::size_t k_count = opts.num_classes, nch = opts.channels, steps = opts.timesteps;
  const std::size_t per_subject = opts.classes_per_subject == 0 ? k_count : opts.classes_per_subject;
  const std::size_t n = k_count * opts.samples_per_class;

  // Subjects holding class k: s with (k - s) mod K < classes_per_subject.
  std::vector<std::vector<int>> holders(k_count);
  for (std::size_t s = 0; s < opts.num_subjects; ++s)
    for (std::size_t j = 0; j < per_subject; ++j) holders[(s + j) % k_count].push_back(static_cast<int>(s) + 1);

  HarDataset out;
  out.windows = Tensor({n, steps, nch});
  out.labels.reserve(n);
  out.subject_ids.reserve(n);
  out.num_classes = k_count;
  if (nch == kUciChannels.size()) {
    out.channel_names.assign(kUciChannels.begin(), kUciChannels.end());
  } else {
    for (std::size_t c = 0; c < nch; ++c) out.channel_names.push_back("ch" + std::to_string(c));
  }

  std::size_t w = 0;
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < opts.samples_per_class; ++i, ++w) {
      for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t c = 0; c < nch; ++c) {
          const double freq = 1.0 + static_cast<double>(k) + 0.25 * static_cast<double>(c % 4);
          const double phase = 0.7 * static_cast<double>(k) + 1.3 * static_cast<double>(c);
          const double arg = 2.0 * std::numbers::pi * freq * static_cast<double>(t) / static_cast<double>(steps);
          double v = std::sin(arg + phase);
          if (opts.noise_std > 0.0) v += opts.noise_std * rng.normal();
          out.windows[(w * steps + t) * nch + c] = v;
        }
      }
      out.labels.push_back(static_cast<int>(k));
      const auto& hs = holders[k];
      out.subject_ids.push_back(hs.empty() ? 1 : hs[i % hs.size()]);
    }
  }
  return out;
}

HarDataset synth_dataset(std::size_t num_classes, std::size_t channels, std::size_t timesteps,
                         std::size_t samples_per_class, double noise_std, Rng& rng) {
  SynthOptions opts;
  opts.num_classes = num_classes;
  opts.channels = channels;
  opts.timesteps = timesteps;
  opts.samples_per_class = samples_per_class;
  opts.noise_std = noise_std;
  return synth_dataset(opts, rng);
}

}  // namespace fsl
