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

#include <optional>

#include "fsl/rng.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

/// Gaussian mechanism applied to cut-layer activations (or, for the FL
/// baseline, to uploaded weights).
struct DPConfig {
  bool enabled = false;
  double epsilon = 80.0;
  double H = 1.0;
  double z = 1.0;
  std::optional<double> clip_bound;  // per-row L2 bound; absent means no clipping
  double alpha = 1.0;                // recorded only; does not enter the noise scale

  /// Throws CalibrationError / ConfigError when the invariants do not hold.
  void validate() const;
};

/// Noise standard deviation H / sqrt(epsilon - z).
double calibrate_sigma(const DPConfig& cfg);
double calibrate_sigma(double epsilon, double H, double z);

/// Scales each row by min(1, C / ||row||_2). An infinite bound is the identity.
Tensor clip_activations(const Tensor& activations, double bound);

/// Disabled: returns the input unchanged. Enabled: optional clipping, then
/// i.i.d. N(0, sigma^2) noise on every element.
Tensor apply_dp(const Tensor& activations, const DPConfig& cfg, Rng& rng);

}  // namespace fsl
