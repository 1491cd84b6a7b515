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

#include "mtuq/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <string>

#include "mtuq/error.hpp"
#include "mtuq/threshold.hpp"

namespace mtuq {
namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view task_name(Task task) {
  return task == Task::kSegmentation ? "segmentation" : "depth";
}

std::string_view metric_name(UQMetric metric) {
  switch (metric) {
    case UQMetric::kAccurateGivenCertain: return "p_accurate_certain";
    case UQMetric::kUncertainGivenInaccurate: return "p_uncertain_inaccurate";
    case UQMetric::kPavpu: return "pavpu";
  }
  return "unknown";
}

std::optional<double> metric_value(UQMetric metric, const UQCounts& counts) {
  switch (metric) {
    case UQMetric::kAccurateGivenCertain: return p_accurate_given_certain(counts);
    case UQMetric::kUncertainGivenInaccurate: return p_uncertain_given_inaccurate(counts);
    case UQMetric::kPavpu: return pavpu(counts);
  }
  return std::nullopt;
}

std::vector<double> default_percentile_grid() {
  std::vector<double> grid(99);
  std::iota(grid.begin(), grid.end(), 1.0);
  return grid;
}

std::vector<UQCounts> sweep_image(const TaskFrame& frame, std::size_t window,
                                  std::span<const double> percentiles) {
  for (double q : percentiles) {
    ThresholdSpec::percentile(q).validate();
  }
  std::vector<UQCounts> out(percentiles.size());
  std::vector<double> pixels = scored_values(frame.uncertainty, frame.scored);
  if (pixels.empty()) return out;
  std::sort(pixels.begin(), pixels.end());

  const UnitSet units =
      make_units(frame.grid, frame.accurate, frame.uncertainty, frame.scored, window);
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return units.uncertainty[a] < units.uncertainty[b];
  });
  std::vector<double> sorted_u(units.size());
  // prefix_accurate[k] = accurate units among the k smallest uncertainties.
  std::vector<std::uint64_t> prefix_accurate(units.size() + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted_u[k] = units.uncertainty[order[k]];
    prefix_accurate[k + 1] = prefix_accurate[k] + units.accurate[order[k]];
  }
  const std::uint64_t total_accurate = prefix_accurate.back();
  const std::uint64_t total = units.size();

  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    const double tau = pixels[nearest_rank(percentiles[i], pixels.size()) - 1];
    // Units strictly below tau are certain.
    const auto certain = static_cast<std::uint64_t>(
        std::lower_bound(sorted_u.begin(), sorted_u.end(), tau) - sorted_u.begin());
    UQCounts& c = out[i];
    c.n_ac = prefix_accurate[certain];
    c.n_ic = certain - c.n_ac;
    c.n_au = total_accurate - c.n_ac;
    c.n_iu = (total - certain) - c.n_au;
  }
  return out;
}

std::vector<CurvePoint> SweepCurve::curve(UQMetric metric) const {
  std::vector<CurvePoint> points(percentiles.size());
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    points[i] = {percentiles[i], metric_value(metric, counts[i])};
  }
  return points;
}

SweepCurve merge_sweeps(std::span<const std::vector<UQCounts>> per_image,
                        std::span<const double> percentiles) {
  if (per_image.empty()) {
    throw Error(ErrorCode::kValidation, "sweep needs at least one image");
  }
  SweepCurve curve;
  curve.percentiles.assign(percentiles.begin(), percentiles.end());
  curve.counts.resize(percentiles.size());
  for (const auto& image : per_image) {
    if (image.size() != percentiles.size()) {
      throw Error(ErrorCode::kValidation, "per-image sweep does not match the percentile grid");
    }
    for (std::size_t i = 0; i < image.size(); ++i) curve.counts[i] += image[i];
  }
  return curve;
}

SweepCurve sweep_metrics(std::span<const TaskFrame> frames, std::size_t window,
                         std::span<const double> percentiles) {
  if (frames.empty()) throw Error(ErrorCode::kValidation, "sweep needs at least one image");
  std::vector<std::vector<UQCounts>> per_image(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    per_image[static_cast<std::size_t>(i)] =
        sweep_image(frames[static_cast<std::size_t>(i)], window, percentiles);
  }
  return merge_sweeps(per_image, percentiles);
}

double auc(std::span<const CurvePoint> curve) {
  double area = 0.0;
  double first = 0.0;
  double last = 0.0;
  std::optional<CurvePoint> prev;
  std::size_t defined = 0;
  for (const CurvePoint& p : curve) {
    if (!p.value) continue;
    const double x = p.percentile / 100.0;
    if (prev) {
      area += 0.5 * (x - prev->percentile / 100.0) * (*p.value + *prev->value);
    } else {
      first = x;
    }
    last = x;
    prev = p;
    ++defined;
  }
  if (defined < 2 || !(last > first)) {
    throw Error(ErrorCode::kUndefinedMetric, "AUC needs at least two defined curve points");
  }
  return area / (last - first);
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  constexpr const char* kEol = "\r\n";
  out << "task,metric,percentile,value" << kEol;
  for (Task task : kTasks) {
    const SweepCurve& curve = result.curves[static_cast<std::size_t>(task)];
    for (UQMetric metric : kUQMetrics) {
      const auto points = curve.curve(metric);
      const std::string prefix =
          std::string(task_name(task)) + "," + std::string(metric_name(metric)) + ",";
      for (const CurvePoint& p : points) {
        out << prefix << format_number(p.percentile) << ",";
        if (p.value) out << format_number(*p.value);
        out << kEol;
      }
      out << prefix << "auc,";
      try {
        out << format_number(auc(points));
      } catch (const Error&) {
        // undefined AUC stays an empty field
      }
      out << kEol;
    }
  }
}

}  // namespace mtuq
