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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mtuq/error.hpp"
#include "mtuq/threshold.hpp"

namespace mtuq {
namespace {

const std::vector<double> kOneToFive = {1, 2, 3, 4, 5};

TEST(Threshold, MeanAndMedian) {
  EXPECT_EQ(compute_threshold(kOneToFive, {}, ThresholdSpec::mean()), 3.0);
  EXPECT_EQ(compute_threshold(kOneToFive, {}, ThresholdSpec::median()), 3.0);
  const std::vector<double> even = {4, 1, 3, 2};
  EXPECT_EQ(compute_threshold(even, {}, ThresholdSpec::median()), 2.0);  // lower median
}

TEST(Threshold, RobustHandExample) {
  EXPECT_NEAR(robust_sigma(kOneToFive), 1.0 / 0.6745, 1e-12);
  EXPECT_NEAR(compute_threshold(kOneToFive, {}, ThresholdSpec::robust(1.0)), 4.48258, 1e-5);
  EXPECT_NEAR(compute_threshold(kOneToFive, {}, ThresholdSpec::robust(1.0)),
              3.0 + 1.0 / 0.6745, 1e-12);
}

TEST(Threshold, ConstantMapCollapses) {
  const std::vector<double> c(7, 0.42);
  for (const auto& spec : {ThresholdSpec::mean(), ThresholdSpec::median(),
                           ThresholdSpec::robust(3.0), ThresholdSpec::percentile(90)}) {
    EXPECT_EQ(compute_threshold(c, {}, spec), 0.42) << spec.to_string();
  }
}

TEST(Threshold, ScoredMaskRestrictsStatistics) {
  const std::vector<double> u = {1, 100, 3};
  const std::vector<std::uint8_t> scored = {1, 0, 1};
  EXPECT_EQ(compute_threshold(u, scored, ThresholdSpec::mean()), 2.0);
}

TEST(Threshold, NegativeFactorRejectedByDefault) {
  try {
    compute_threshold(kOneToFive, {}, ThresholdSpec::robust(-1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableThreshold);
  }
  ThresholdSpec forced = ThresholdSpec::robust(-1.0);
  forced.allow_negative_f = true;
  EXPECT_NEAR(compute_threshold(kOneToFive, {}, forced), 3.0 - 1.0 / 0.6745, 1e-12);
}

TEST(Threshold, NearestRankPercentile) {
  std::vector<double> v = {5, 1, 4, 2, 3};
  EXPECT_EQ(nearest_rank_percentile(v, 20), 1.0);
  EXPECT_EQ(nearest_rank_percentile(v, 21), 2.0);
  EXPECT_EQ(nearest_rank_percentile(v, 99), 5.0);
  EXPECT_EQ(nearest_rank(1, 5), 1u);
  EXPECT_EQ(nearest_rank(50, 4), 2u);
  EXPECT_EQ(nearest_rank(0.001, 3), 1u);
}

TEST(Threshold, PercentileRangeChecked) {
  for (double q : {0.0, 100.0, -1.0, std::numeric_limits<double>::quiet_NaN()}) {
    EXPECT_THROW(ThresholdSpec::percentile(q).validate(), Error);
  }
}

TEST(Threshold, ParseAndFormatRoundTrip) {
  for (const char* s : {"mean", "median", "robust:f=2", "robust:f=0.5", "percentile:q=25",
                        "percentile:q=12.5"}) {
    EXPECT_EQ(ThresholdSpec::parse(s).to_string(), s);
  }
  EXPECT_EQ(ThresholdSpec::parse("robust"), ThresholdSpec::robust(2.0));
  for (const char* bad : {"", "avg", "robust:f=", "robust:q=1", "percentile:q=abc",
                          "percentile", "mean:f=1"}) {
    EXPECT_THROW(ThresholdSpec::parse(bad), Error) << bad;
  }
}

TEST(Threshold, RobustSigmaOnNormalDraws) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  std::vector<double> v(200000);
  for (double& x : v) x = z(rng);
  EXPECT_NEAR(robust_sigma(v), 1.0, 0.02);
}

TEST(Classify, StrictInequality) {
  const std::vector<double> u = {0.1, 0.9};
  EXPECT_EQ(classify(u, {}, 0.5).certain, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(classify(u, {}, 0.0).certain, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(classify(u, {}, 0.9).certain, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(classify(u, {}, 1e9).certain, (std::vector<std::uint8_t>{1, 1}));
}

TEST(Classify, UnscoredNeverCertain) {
  const std::vector<double> u = {0.1, 0.1};
  const std::vector<std::uint8_t> scored = {0, 1};
  EXPECT_EQ(classify(u, scored, 0.5).certain, (std::vector<std::uint8_t>{0, 1}));
}

}  // namespace
}  // namespace mtuq
