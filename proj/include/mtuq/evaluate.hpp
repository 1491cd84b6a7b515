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

// Dataset evaluation: per image, fuse the samples, score both tasks,
// threshold each uncertainty map with the image's own tau, and count the
// accurate/certain contingency. Dataset numbers come from merged counts
// (micro aggregation); per-image values are kept alongside.

#ifndef MTUQ_EVALUATE_HPP_
#define MTUQ_EVALUATE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtuq/depth_metrics.hpp"
#include "mtuq/fusion.hpp"
#include "mtuq/manifest.hpp"
#include "mtuq/seg_metrics.hpp"
#include "mtuq/sweep.hpp"
#include "mtuq/threshold.hpp"
#include "mtuq/uq_metrics.hpp"

namespace mtuq {

struct EvalOptions {
  std::vector<ThresholdSpec> thresholds = {ThresholdSpec::mean()};
  std::size_t window = 1;
  std::size_t bins = kDefaultEceBins;
  FusionOptions fusion;
  bool sweep = true;
  std::vector<double> percentiles = default_percentile_grid();

  // Throws kInvalidParameter / kUnstableThreshold.
  void validate() const;
};

struct DatasetSpec {
  std::size_t num_classes = 0;
  std::int64_t ignore_index = 255;
  double depth_invalid_value = 0.0;
};

// Segmentation: accurate iff label == gt, scored iff gt != ignore_index,
// uncertainty = entropy. Depth: accurate iff delta_1, scored iff gt valid,
// uncertainty = total variance.
TaskFrame segmentation_frame(const SegFusion& fused, const GroundTruthFrame& truth,
                             std::int64_t ignore_index);
TaskFrame depth_frame(const DepthFusion& fused, const GroundTruthFrame& truth,
                      double depth_invalid_value);

struct ThresholdResult {
  std::optional<double> tau;  // empty when the image has no scored pixel
  UQCounts counts;
};

// Threshold + classify + count on one frame.
ThresholdResult evaluate_threshold(const TaskFrame& frame, const ThresholdSpec& spec,
                                   std::size_t window);

struct ImageEvaluation {
  std::string image_id;
  ConfusionMatrix confusion;
  CalibrationBins calibration;
  SquaredError squared_error;
  DeltaCounts delta;
  // [task][threshold index]
  std::array<std::vector<ThresholdResult>, 2> uq;
  // [task][percentile index]; empty when the sweep is disabled.
  std::array<std::vector<UQCounts>, 2> sweep;
};

ImageEvaluation evaluate_image(std::string image_id, const FusedPrediction& fused,
                               const GroundTruthFrame& truth, const DatasetSpec& dataset,
                               const EvalOptions& options);

struct DatasetEvaluation {
  std::vector<ImageEvaluation> images;  // manifest order
  ConfusionMatrix confusion;
  CalibrationBins calibration;
  SquaredError squared_error;
  DeltaCounts delta;
  std::array<std::vector<UQCounts>, 2> uq;  // [task][threshold index]
  std::optional<SweepResult> sweep;
};

// Merges in the given order, so the result does not depend on how the
// images were scheduled.
DatasetEvaluation aggregate(std::vector<ImageEvaluation> images,
                            const EvalOptions& options);

// Loads, fuses and evaluates every manifest entry; images run in parallel.
DatasetEvaluation evaluate_manifest(const DatasetManifest& manifest,
                                    const EvalOptions& options);

}  // namespace mtuq

#endif  // MTUQ_EVALUATE_HPP_
