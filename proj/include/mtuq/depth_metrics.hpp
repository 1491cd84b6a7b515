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

#ifndef MTUQ_DEPTH_METRICS_HPP_
#define MTUQ_DEPTH_METRICS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mtuq {

// delta_1, delta_2, delta_3 ratio thresholds.
inline constexpr std::array<double, 3> kDeltaThresholds = {1.25, 1.25 * 1.25,
                                                           1.25 * 1.25 * 1.25};

// A ground-truth depth is valid iff it is finite, positive and not equal to
// the invalid marker.
std::vector<std::uint8_t> depth_validity(std::span<const float> gt_depth,
                                         double invalid_value);

// Mergeable RMSE state.
struct SquaredError {
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  SquaredError& operator+=(const SquaredError& o) {
    sum_sq += o.sum_sq;
    count += o.count;
    return *this;
  }
  // Throws kUndefinedMetric when count == 0.
  double rmse() const;
};

SquaredError accumulate_squared_error(std::span<const double> depth,
                                      std::span<const float> gt_depth,
                                      std::span<const std::uint8_t> valid);

// sqrt(mean over valid pixels of (depth - gt)^2).
double rmse(std::span<const double> depth, std::span<const float> gt_depth,
            std::span<const std::uint8_t> valid);

// max(pred/gt, gt/pred) with pred <= 0 mapped to +inf.
double depth_ratio(double pred, double gt);

struct DepthAccuracyMask {
  std::vector<std::uint8_t> accurate;  // implies valid
  std::vector<std::uint8_t> valid;
};

// accurate[n] iff valid[n] and depth_ratio < threshold (strict).
DepthAccuracyMask delta_accuracy(std::span<const double> depth,
                                 std::span<const float> gt_depth,
                                 std::span<const std::uint8_t> valid,
                                 double threshold);

namespace serial {
DepthAccuracyMask delta_accuracy(std::span<const double> depth,
                                 std::span<const float> gt_depth,
                                 std::span<const std::uint8_t> valid,
                                 double threshold);
}  // namespace serial

// Counts of delta_1..3-accurate pixels over `valid` pixels; mergeable.
struct DeltaCounts {
  std::array<std::uint64_t, 3> accurate{};
  std::uint64_t valid = 0;

  DeltaCounts& operator+=(const DeltaCounts& o) {
    for (std::size_t i = 0; i < 3; ++i) accurate[i] += o.accurate[i];
    valid += o.valid;
    return *this;
  }
  // Fraction for delta_{k+1}; throws kUndefinedMetric when valid == 0.
  double fraction(std::size_t k) const;
};

DeltaCounts count_delta(std::span<const double> depth,
                        std::span<const float> gt_depth,
                        std::span<const std::uint8_t> valid);

}  // namespace mtuq

#endif  // MTUQ_DEPTH_METRICS_HPP_
