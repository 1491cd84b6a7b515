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

#ifndef MTUQ_SWEEP_HPP_
#define MTUQ_SWEEP_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "mtuq/uq_metrics.hpp"

namespace mtuq {

enum class Task { kSegmentation = 0, kDepth = 1 };
inline constexpr std::array<Task, 2> kTasks = {Task::kSegmentation, Task::kDepth};
std::string_view task_name(Task task);

enum class UQMetric { kAccurateGivenCertain = 0, kUncertainGivenInaccurate = 1, kPavpu = 2 };
inline constexpr std::array<UQMetric, 3> kUQMetrics = {
    UQMetric::kAccurateGivenCertain, UQMetric::kUncertainGivenInaccurate,
    UQMetric::kPavpu};
std::string_view metric_name(UQMetric metric);
std::optional<double> metric_value(UQMetric metric, const UQCounts& counts);

// Per-image, per-task inputs to the uncertainty metrics. `scored` excludes
// ignored labels (segmentation) or invalid ground truth (depth).
struct TaskFrame {
  Grid grid;
  std::vector<double> uncertainty;
  std::vector<std::uint8_t> accurate;
  std::vector<std::uint8_t> scored;
};

// 1, 2, ..., 99.
std::vector<double> default_percentile_grid();

// UQCounts of one image at each grid percentile: tau is the nearest-rank
// percentile of the image's scored pixel uncertainties, units come from
// make_units(window). All entries are zero when nothing is scored. Sorting
// once makes each grid point O(log N).
std::vector<UQCounts> sweep_image(const TaskFrame& frame, std::size_t window,
                                  std::span<const double> percentiles);

struct CurvePoint {
  double percentile = 0.0;
  std::optional<double> value;
};

struct SweepCurve {
  std::vector<double> percentiles;
  std::vector<UQCounts> counts;  // merged over images, one per percentile

  std::vector<CurvePoint> curve(UQMetric metric) const;
};

// Merges per-image sweep_image results. Throws kValidation on an empty
// dataset or mismatched grids.
SweepCurve merge_sweeps(std::span<const std::vector<UQCounts>> per_image,
                        std::span<const double> percentiles);

// Convenience: sweep of a dataset of frames for one task.
SweepCurve sweep_metrics(std::span<const TaskFrame> frames, std::size_t window,
                         std::span<const double> percentiles);

// Trapezoidal area over the non-null points, divided by the span they
// cover, so a constant curve c integrates to c. Throws kUndefinedMetric with
// fewer than two non-null points.
double auc(std::span<const CurvePoint> curve);

struct SweepResult {
  std::array<SweepCurve, 2> curves;  // indexed by Task
};

// RFC-4180 CSV with header task,metric,percentile,value; after the 99
// points of each (task, metric) comes one row with percentile "auc".
// Undefined values are empty fields.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace mtuq

#endif  // MTUQ_SWEEP_HPP_
