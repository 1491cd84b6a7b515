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

#include "mtuq/depth_metrics.hpp"

#include <cmath>
#include <limits>

#include "mtuq/error.hpp"

namespace mtuq {
namespace {

void check_sizes(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) {
    throw Error(ErrorCode::kValidation, "depth maps and validity mask differ in size");
  }
}

template <bool kParallel>
DepthAccuracyMask delta_impl(std::span<const double> depth,
                             std::span<const float> gt_depth,
                             std::span<const std::uint8_t> valid,
                             double threshold) {
  check_sizes(depth.size(), gt_depth.size(), valid.size());
  DepthAccuracyMask mask;
  mask.valid.assign(valid.begin(), valid.end());
  mask.accurate.assign(valid.size(), 0);
  const auto count = static_cast<std::ptrdiff_t>(valid.size());

#pragma omp parallel for if (kParallel) schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto n = static_cast<std::size_t>(k);
    if (valid[n] && depth_ratio(depth[n], gt_depth[n]) < threshold) {
      mask.accurate[n] = 1;
    }
  }
  return mask;
}

}  // namespace

std::vector<std::uint8_t> depth_validity(std::span<const float> gt_depth,
                                         double invalid_value) {
  std::vector<std::uint8_t> valid(gt_depth.size());
  for (std::size_t n = 0; n < gt_depth.size(); ++n) {
    const double y = gt_depth[n];
    valid[n] = std::isfinite(y) && y > 0.0 && y != invalid_value;
  }
  return valid;
}

double SquaredError::rmse() const {
  if (count == 0) throw Error(ErrorCode::kUndefinedMetric, "RMSE undefined: no valid pixels");
  return std::sqrt(sum_sq / static_cast<double>(count));
}

SquaredError accumulate_squared_error(std::span<const double> depth,
                                      std::span<const float> gt_depth,
                                      std::span<const std::uint8_t> valid) {
  check_sizes(depth.size(), gt_depth.size(), valid.size());
  SquaredError acc;
  for (std::size_t n = 0; n < depth.size(); ++n) {
    if (!valid[n]) continue;
    const double e = depth[n] - static_cast<double>(gt_depth[n]);
    acc.sum_sq += e * e;
    ++acc.count;
  }
  return acc;
}

double rmse(std::span<const double> depth, std::span<const float> gt_depth,
            std::span<const std::uint8_t> valid) {
  return accumulate_squared_error(depth, gt_depth, valid).rmse();
}

double depth_ratio(double pred, double gt) {
  if (!(pred > 0.0) || !(gt > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(pred / gt, gt / pred);
}

DepthAccuracyMask delta_accuracy(std::span<const double> depth,
                                 std::span<const float> gt_depth,
                                 std::span<const std::uint8_t> valid,
                                 double threshold) {
  return delta_impl<true>(depth, gt_depth, valid, threshold);
}

namespace serial {
DepthAccuracyMask delta_accuracy(std::span<const double> depth,
                                 std::span<const float> gt_depth,
                                 std::span<const std::uint8_t> valid,
                                 double threshold) {
  return delta_impl<false>(depth, gt_depth, valid, threshold);
}
}  // namespace serial

double DeltaCounts::fraction(std::size_t k) const {
  if (valid == 0) throw Error(ErrorCode::kUndefinedMetric, "delta accuracy undefined: no valid pixels");
  return static_cast<double>(accurate.at(k)) / static_cast<double>(valid);
}

DeltaCounts count_delta(std::span<const double> depth,
                        std::span<const float> gt_depth,
                        std::span<const std::uint8_t> valid) {
  check_sizes(depth.size(), gt_depth.size(), valid.size());
  DeltaCounts counts;
  for (std::size_t n = 0; n < depth.size(); ++n) {
    if (!valid[n]) continue;
    ++counts.valid;
    const double r = depth_ratio(depth[n], gt_depth[n]);
    for (std::size_t k = 0; k < 3; ++k) {
      if (r < kDeltaThresholds[k]) ++counts.accurate[k];
    }
  }
  return counts;
}

}  // namespace mtuq
