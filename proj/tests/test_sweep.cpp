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
#include <numbers>
#include <random>
#include <sstream>

#include "mtuq/error.hpp"
#include "mtuq/evaluate.hpp"
#include "mtuq/sweep.hpp"
#include "oracles.hpp"

namespace mtuq {
namespace {

std::vector<CurvePoint> curve_of(double (*fn)(double)) {
  std::vector<CurvePoint> c;
  for (double q : default_percentile_grid()) c.push_back({q, fn(q)});
  return c;
}

TaskFrame random_frame(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  std::uniform_real_distribution<double> u(0, 1);
  TaskFrame f;
  f.grid = {h, w};
  f.uncertainty.resize(h * w);
  for (double& x : f.uncertainty) x = std::round(u(rng) * 40) / 40;  // force ties
  f.scored = oracle::random_mask(rng, h * w, 0.85);
  f.accurate = oracle::random_mask(rng, h * w, 0.6);
  for (std::size_t n = 0; n < h * w; ++n) f.accurate[n] &= f.scored[n];
  return f;
}

TEST(Auc, ConstantCurve) {
  EXPECT_NEAR(auc(curve_of([](double) { return 0.75; })), 0.75, 1e-12);
}

TEST(Auc, LinearCurve) {
  EXPECT_NEAR(auc(curve_of([](double q) { return (q - 1.0) / 98.0; })), 0.5, 1e-12);
}

TEST(Auc, MatchesMidpointQuadrature) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const auto fn = [&](double q) {
      const double x = (q - 1.0) / 98.0;
      return 0.5 + 0.2 * a * std::sin(2 * std::numbers::pi * x) + 0.2 * b * x * x +
             0.1 * c * std::cos(5 * x);
    };
    std::vector<CurvePoint> c1;
    for (double q : default_percentile_grid()) c1.push_back({q, fn(q)});
    const int steps = 10000;
    double integral = 0.0;
    for (int i = 0; i < steps; ++i) integral += fn(1.0 + 98.0 * (i + 0.5) / steps);
    EXPECT_NEAR(auc(c1), integral / steps, 2e-3);
  }
}

TEST(Auc, SkipsUndefinedPoints) {
  std::vector<CurvePoint> c = {{10, 0.2}, {20, std::nullopt}, {30, 0.6}};
  EXPECT_NEAR(auc(c), 0.4, 1e-15);
  std::vector<CurvePoint> one = {{10, 0.2}, {20, std::nullopt}};
  EXPECT_THROW(auc(one), Error);
}

TEST(Sweep, PointsEqualIndependentEvaluation) {
  std::mt19937_64 rng(52);
  for (std::size_t window : {1u, 2u, 3u}) {
    const TaskFrame f = random_frame(rng, 9, 11);
    const auto qs = default_percentile_grid();
    const auto counts = sweep_image(f, window, qs);
    ASSERT_EQ(counts.size(), qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const ThresholdResult r = evaluate_threshold(f, ThresholdSpec::percentile(qs[i]), window);
      EXPECT_EQ(counts[i], r.counts) << "q=" << qs[i] << " window=" << window;
    }
  }
}

TEST(Sweep, UncertaintyEqualToInaccuracy) {
  std::mt19937_64 rng(4);
  TaskFrame f;
  f.grid = {10, 10};
  f.accurate = oracle::random_mask(rng, 100, 0.7);
  f.scored.assign(100, 1);
  for (std::uint8_t a : f.accurate) f.uncertainty.push_back(a ? 0.0 : 1.0);
  const auto qs = default_percentile_grid();
  const auto counts = sweep_image(f, 1, qs);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    EXPECT_EQ(*p_uncertain_given_inaccurate(counts[i]), 1.0) << qs[i];
  }
}

TEST(Sweep, ConstantMapIsAllUncertain) {
  TaskFrame f;
  f.grid = {4, 4};
  f.uncertainty.assign(16, 0.3);
  f.scored.assign(16, 1);
  f.accurate.assign(16, 0);
  f.accurate[3] = 1;
  for (const UQCounts& c : sweep_image(f, 1, default_percentile_grid())) {
    EXPECT_EQ(c, (UQCounts{0, 1, 0, 15}));
  }
}

TEST(Sweep, MergedCurvesSumImages) {
  std::mt19937_64 rng(12);
  std::vector<TaskFrame> frames = {random_frame(rng, 5, 5), random_frame(rng, 6, 4),
                                   random_frame(rng, 3, 7)};
  const auto qs = default_percentile_grid();
  const SweepCurve merged = sweep_metrics(frames, 1, qs);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    UQCounts sum;
    for (const TaskFrame& f : frames) {
      sum += evaluate_threshold(f, ThresholdSpec::percentile(qs[i]), 1).counts;
    }
    EXPECT_EQ(merged.counts[i], sum);
  }
}

TEST(Sweep, CsvLayout) {
  TaskFrame f;
  f.grid = {2, 2};
  f.uncertainty = {0.1, 0.2, 0.3, 0.4};
  f.scored.assign(4, 1);
  f.accurate = {1, 1, 0, 0};
  SweepResult r;
  const std::vector<double> qs = {25, 75};
  r.curves[0] = sweep_metrics(std::vector<TaskFrame>{f}, 1, qs);
  r.curves[1] = r.curves[0];
  std::ostringstream out;
  write_sweep_csv(out, r);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("task,metric,percentile,value\r\n", 0), 0u);
  EXPECT_NE(s.find("segmentation,p_accurate_certain,25,\r\n"), std::string::npos);
  EXPECT_NE(s.find("segmentation,p_accurate_certain,75,1\r\n"), std::string::npos);
  EXPECT_NE(s.find("depth,pavpu,auc,"), std::string::npos);
}

}  // namespace
}  // namespace mtuq
