/*
 * Copyright 2026 The mtuq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mtuq/depth_metrics.hpp"
#include "mtuq/error.hpp"

namespace mtuq {
namespace {

TEST(DepthValidity, MarkerNonFiniteAndNonPositive) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const std::vector<float> gt = {1.0f, 0.0f, -2.0f, nan, 65.0f, 3.0f};
  EXPECT_EQ(depth_validity(gt, 0.0), (std::vector<std::uint8_t>{1, 0, 0, 0, 1, 1}));
  EXPECT_EQ(depth_validity(gt, 65.0), (std::vector<std::uint8_t>{1, 0, 0, 0, 0, 1}));
}

TEST(Rmse, ExactPrediction) {
  const std::vector<float> gt = {1, 2, 3};
  const std::vector<double> d = {1, 2, 3};
  EXPECT_EQ(rmse(d, gt, depth_validity(gt, 0.0)), 0.0);
}

TEST(Rmse, ConstantOffset) {
  const std::vector<float> gt = {1, 2, 0, 4};
  const std::vector<double> d = {3, 4, 100, 6};
  EXPECT_EQ(rmse(d, gt, depth_validity(gt, 0.0)), 2.0);
}

TEST(Rmse, MatchesLoopOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> gt(36);
    std::vector<double> d(36);
    for (std::size_t n = 0; n < 36; ++n) {
      gt[n] = (rng() % 7 == 0) ? 0.0f : static_cast<float>(u(rng));
      d[n] = u(rng);
    }
    const auto valid = depth_validity(gt, 0.0);
    double sum = 0.0;
    int count = 0;
    for (std::size_t n = 0; n < 36; ++n) {
      if (gt[n] > 0.0f) {
        sum += (d[n] - gt[n]) * (d[n] - gt[n]);
        ++count;
      }
    }
    EXPECT_NEAR(rmse(d, gt, valid), std::sqrt(sum / count), 1e-12);
  }
}

TEST(Rmse, NoValidPixelsIsUndefined) {
  const std::vector<float> gt = {0, 0};
  const std::vector<double> d = {1, 1};
  try {
    rmse(d, gt, depth_validity(gt, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedMetric);
  }
}

TEST(Delta, ExactIsAlwaysAccurate) {
  const std::vector<float> gt = {2, 7};
  const std::vector<double> d = {2, 7};
  const auto m = delta_accuracy(d, gt, depth_validity(gt, 0.0), 1.0001);
  EXPECT_EQ(m.accurate, (std::vector<std::uint8_t>{1, 1}));
}

TEST(Delta, BoundaryRatioIsInaccurate) {
  EXPECT_EQ(depth_ratio(10.0, 8.0), 1.25);
  EXPECT_EQ(depth_ratio(8.0, 10.0), 1.25);
  const std::vector<float> gt = {8.0f, 10.0f};
  const std::vector<double> d = {10.0, 8.0};
  const auto m = delta_accuracy(d, gt, depth_validity(gt, 0.0), kDeltaThresholds[0]);
  EXPECT_EQ(m.accurate, (std::vector<std::uint8_t>{0, 0}));
}

TEST(Delta, NonPositivePredictionIsInaccurate) {
  EXPECT_TRUE(std::isinf(depth_ratio(0.0, 3.0)));
  const std::vector<float> gt = {3.0f};
  const std::vector<double> d = {0.0};
  const DeltaCounts c = count_delta(d, gt, depth_validity(gt, 0.0));
  EXPECT_EQ(c.accurate, (std::array<std::uint64_t, 3>{0, 0, 0}));
  EXPECT_EQ(c.valid, 1u);
}

TEST(Delta, ThresholdsAreNested) {
  std::mt19937_64 rng(41);
  std::lognormal_distribution<double> ratio(0.0, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> gt(400);
    std::vector<double> d(400);
    for (std::size_t n = 0; n < gt.size(); ++n) {
      gt[n] = static_cast<float>(1.0 + (rng() % 1000) / 50.0);
      d[n] = gt[n] * ratio(rng);
    }
    const auto valid = depth_validity(gt, 0.0);
    std::array<DepthAccuracyMask, 3> masks;
    for (std::size_t k = 0; k < 3; ++k) masks[k] = delta_accuracy(d, gt, valid, kDeltaThresholds[k]);
    for (std::size_t n = 0; n < gt.size(); ++n) {
      EXPECT_LE(masks[0].accurate[n], masks[1].accurate[n]);
      EXPECT_LE(masks[1].accurate[n], masks[2].accurate[n]);
    }
    const DeltaCounts c = count_delta(d, gt, valid);
    EXPECT_LE(c.fraction(0), c.fraction(1));
    EXPECT_LE(c.fraction(1), c.fraction(2));
  }
}

TEST(Delta, InvalidPixelsNeverAccurate) {
  const std::vector<float> gt = {0.0f, 5.0f};
  const std::vector<double> d = {0.0, 5.0};
  const auto m = delta_accuracy(d, gt, depth_validity(gt, 0.0), 1.25);
  EXPECT_EQ(m.accurate, (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(m.valid, (std::vector<std::uint8_t>{0, 1}));
}

}  // namespace
}  // namespace mtuq
