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
#include <limits>

#include "fsl/dp.hpp"
#include "fsl/error.hpp"
#include "oracles.hpp"

namespace fsl {
namespace {

double row_norm(const Tensor& t, std::size_t r) {
  double s = 0;
  for (std::size_t c = 0; c < t.dim(1); ++c) s += t.at(r, c) * t.at(r, c);
  return std::sqrt(s);
}

TEST(CalibrateSigma, DirectEvaluation) {
  EXPECT_EQ(calibrate_sigma(4.0, 2.0, 0.0), 1.0);
  EXPECT_EQ(calibrate_sigma(5.0, 1.0, 1.0), 0.5);
}

TEST(CalibrateSigma, MatchesClosedFormOnTheExperimentBudgets) {
  for (double eps : {40.0, 50.0, 80.0}) {
    EXPECT_DOUBLE_EQ(calibrate_sigma(eps, 1.0, 1.0), oracle::noise_std(eps, 1.0, 1.0));
  }
}

TEST(CalibrateSigma, RejectsBudgetAtOrBelowFloor) {
  try {
    calibrate_sigma(1.0, 1.0, 1.0);
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& e) {
    EXPECT_NE(std::string(e.what()).find("privacy budget below floor z"), std::string::npos);
  }
  EXPECT_THROW(calibrate_sigma(0.5, 1.0, 1.0), CalibrationError);
}

TEST(CalibrateSigma, StrictlyDecreasingInEpsilon) {
  double prev = std::numeric_limits<double>::infinity();
  for (double eps = 1.5; eps < 200; eps *= 1.3) {
    const double s = calibrate_sigma(eps, 1.0, 1.0);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(DPConfig, ValidatesInvariants) {
  DPConfig cfg;
  cfg.enabled = true;
  EXPECT_NO_THROW(cfg.validate());
  cfg.H = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.H = 1.0;
  cfg.clip_bound = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.clip_bound.reset();
  cfg.epsilon = 0.5;
  EXPECT_THROW(cfg.validate(), CalibrationError);
  cfg.enabled = false;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Clip, RowUnderTheBoundIsUnchanged) {
  const Tensor s = Tensor::matrix({{0, 2}});
  EXPECT_EQ(clip_activations(s, 4.0), s);
}

TEST(Clip, RowOverTheBoundIsScaledToIt) {
  const Tensor s = Tensor::matrix({{0, 4}, {0, 1}});
  const Tensor c = clip_activations(s, 2.0);
  EXPECT_EQ(c.at(0, 1), 2.0);
  EXPECT_EQ(row_norm(c, 0), 2.0);
  EXPECT_EQ(c.at(1, 1), 1.0);
}

TEST(Clip, InfiniteBoundIsIdentity) {
  Rng r(1);
  const Tensor s = gaussian_sample(r, {5, 7}, 0, 100);
  EXPECT_EQ(clip_activations(s, std::numeric_limits<double>::infinity()), s);
}

TEST(ApplyDp, DisabledIsBitExactPassThrough) {
  Rng r(1);
  const Tensor s = gaussian_sample(r, {4, 9}, 0, 1);
  DPConfig cfg;
  cfg.enabled = false;
  const Rng before = r;
  EXPECT_EQ(apply_dp(s, cfg, r), s);
  EXPECT_EQ(r.counter(), before.counter());
}

TEST(ApplyDp, VanishingNoiseLimit) {
  Rng r(2);
  const Tensor s = gaussian_sample(r, {50, 100}, 0, 1);
  DPConfig cfg;
  cfg.enabled = true;
  cfg.H = 1.0;
  cfg.z = 0.0;
  cfg.epsilon = 1e12;
  EXPECT_LT(max_abs_diff(apply_dp(s, cfg, r), s), 1e-5);
}

TEST(ApplyDp, EmpiricalStdWithinOnePercent) {
  DPConfig cfg;
  cfg.enabled = true;
  cfg.H = 2.0;
  cfg.z = 0.0;
  cfg.epsilon = 16.0;  // zeta = 0.5
  Rng r(3);
  const Tensor s = Tensor::filled({1000, 1000}, 0.25);
  const Tensor out = apply_dp(s, cfg, r);
  EXPECT_EQ(out.shape(), s.shape());
  std::vector<double> delta(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) delta[i] = out[i] - s[i];
  EXPECT_NEAR(oracle::sample_std(delta, 0.0), 0.5, 0.005);
}

TEST(ApplyDp, FreshNoiseEachCall) {
  DPConfig cfg;
  cfg.enabled = true;
  Rng r(4);
  const Tensor s = Tensor::zeros({3, 3});
  EXPECT_NE(apply_dp(s, cfg, r), apply_dp(s, cfg, r));
}

TEST(ApplyDp, ClipsBeforeNoise) {
  DPConfig cfg;
  cfg.enabled = true;
  cfg.z = 0.0;
  cfg.epsilon = 1e30;
  cfg.clip_bound = 1.0;
  Rng r(5);
  const Tensor out = apply_dp(Tensor::matrix({{3, 4}}), cfg, r);
  EXPECT_NEAR(out.at(0, 0), 0.6, 1e-12);
  EXPECT_NEAR(out.at(0, 1), 0.8, 1e-12);
}

}  // namespace
}  // namespace fsl
