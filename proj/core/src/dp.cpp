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

#include "fsl/dp.hpp"

#include <cmath>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

void DPConfig::validate() const {
  if (!(H > 0.0)) throw ConfigError("dp.H must be positive, got " + std::to_string(H));
  if (clip_bound && !(*clip_bound > 0.0)) {
    throw ConfigError("dp.clip must be positive, got " + std::to_string(*clip_bound));
  }
  if (enabled && !(epsilon > z)) {
    throw CalibrationError("dp.epsilon = " + std::to_string(epsilon) + " violates epsilon > z (z = " +
                           std::to_string(z) + "): sigma = H / sqrt(epsilon - z) is undefined");
  }
}

double calibrate_sigma(double epsilon, double H, double z) {
  if (!(epsilon > z)) {
    throw CalibrationError("privacy budget below floor z: epsilon = " + std::to_string(epsilon) +
                           ", z = " + std::to_string(z));
  }
  return H / std::sqrt(epsilon - z);
}

double calibrate_sigma(const DPConfig& cfg) {
  if (!(cfg.H > 0.0)) throw CalibrationError("dp.H must be positive");
  return calibrate_sigma(cfg.epsilon, cfg.H, cfg.z);
}

Tensor clip_activations(const Tensor& activations, double bound) {
  if (!(bound > 0.0)) throw Error("clip bound must be positive");
  if (activations.rank() != 2) throw DimensionError("clip expects a matrix, got " + to_string(activations.shape()));
  Tensor out = activations;
  if (std::isinf(bound)) return out;
  const std::size_t cols = out.dim(1);
  for (std::size_t r = 0; r < out.dim(0); ++r) {
    double sq = 0.0;
    for (std::size_t c = 0; c < cols; ++c) sq += out.at(r, c) * out.at(r, c);
    const double norm = std::sqrt(sq);
    if (norm <= bound) continue;
    const double factor = bound / norm;
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) *= factor;
  }
  return out;
}

Tensor apply_dp(const Tensor& activations, const DPConfig& cfg, Rng& rng) {
  if (!cfg.enabled) return activations;
  const double sigma = calibrate_sigma(cfg);
  Tensor out = cfg.clip_bound ? clip_activations(activations, *cfg.clip_bound) : activations;
  for (double& v : out.data()) v += sigma * rng.normal();
  return out;
}

}  // namespace fsl
