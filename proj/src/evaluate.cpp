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

#include "mtuq/evaluate.hpp"

#include <algorithm>
#include <exception>

#include "mtuq/error.hpp"

namespace mtuq {

void EvalOptions::validate() const {
  if (thresholds.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "at least one threshold is required");
  }
  for (const auto& t : thresholds) t.validate();
  if (window == 0) throw Error(ErrorCode::kInvalidParameter, "window must be a positive integer");
  if (bins == 0) throw Error(ErrorCode::kInvalidParameter, "ECE needs at least one bin");
  for (double q : percentiles) ThresholdSpec::percentile(q).validate();
}

TaskFrame segmentation_frame(const SegFusion& fused, const GroundTruthFrame& truth,
                             std::int64_t ignore_index) {
  if (fused.grid != truth.grid) {
    throw Error(ErrorCode::kValidation, "segmentation prediction and ground truth differ in H x W");
  }
  TaskFrame frame;
  frame.grid = fused.grid;
  frame.uncertainty = fused.uncertainty;
  const std::size_t n_pixels = fused.grid.pixels();
  frame.accurate.resize(n_pixels);
  frame.scored.resize(n_pixels);
  for (std::size_t n = 0; n < n_pixels; ++n) {
    frame.scored[n] = truth.labels[n] != ignore_index;
    frame.accurate[n] = frame.scored[n] && fused.label[n] == truth.labels[n];
  }
  return frame;
}

TaskFrame depth_frame(const DepthFusion& fused, const GroundTruthFrame& truth,
                      double depth_invalid_value) {
  if (fused.grid != truth.grid) {
    throw Error(ErrorCode::kValidation, "depth prediction and ground truth differ in H x W");
  }
  TaskFrame frame;
  frame.grid = fused.grid;
  frame.uncertainty = fused.total;
  frame.scored = depth_validity(truth.depth, depth_invalid_value);
  frame.accurate =
      delta_accuracy(fused.depth, truth.depth, frame.scored, kDeltaThresholds[0]).accurate;
  return frame;
}

ThresholdResult evaluate_threshold(const TaskFrame& frame, const ThresholdSpec& spec,
                                   std::size_t window) {
  ThresholdResult result;
  const bool any_scored =
      std::find(frame.scored.begin(), frame.scored.end(), std::uint8_t{1}) !=
      frame.scored.end();
  if (!any_scored) {
    spec.validate();
    return result;
  }
  const double tau = compute_threshold(frame.uncertainty, frame.scored, spec);
  result.tau = tau;
  if (window == 1) {
    const CertaintyMask mask = classify(frame.uncertainty, frame.scored, tau);
    result.counts = count_joint(frame.accurate, mask.certain, frame.scored);
  } else {
    result.counts = count_joint(frame.grid, frame.accurate, frame.uncertainty,
                                frame.scored, tau, window);
  }
  return result;
}

ImageEvaluation evaluate_image(std::string image_id, const FusedPrediction& fused,
                               const GroundTruthFrame& truth, const DatasetSpec& dataset,
                               const EvalOptions& options) {
  ImageEvaluation out;
  out.image_id = std::move(image_id);
  try {
    const SegFusion& seg = fused.seg;
    out.confusion = accumulate_confusion(seg.label, truth.labels, seg.classes,
                                         dataset.ignore_index);
    out.calibration = accumulate_calibration(seg.prob, seg.label, truth.labels,
                                             seg.classes, dataset.ignore_index,
                                             options.bins);

    const TaskFrame seg_frame = segmentation_frame(seg, truth, dataset.ignore_index);
    const TaskFrame depth_frm =
        depth_frame(fused.depth, truth, dataset.depth_invalid_value);
    out.squared_error =
        accumulate_squared_error(fused.depth.depth, truth.depth, depth_frm.scored);
    out.delta = count_delta(fused.depth.depth, truth.depth, depth_frm.scored);

    const std::array<const TaskFrame*, 2> frames = {&seg_frame, &depth_frm};
    for (Task task : kTasks) {
      const auto t = static_cast<std::size_t>(task);
      for (const ThresholdSpec& spec : options.thresholds) {
        out.uq[t].push_back(evaluate_threshold(*frames[t], spec, options.window));
      }
      if (options.sweep) {
        out.sweep[t] = sweep_image(*frames[t], options.window, options.percentiles);
      }
    }
  } catch (const Error& e) {
    throw Error(e.code(), "image '" + out.image_id + "': " + e.what());
  }
  return out;
}

DatasetEvaluation aggregate(std::vector<ImageEvaluation> images,
                            const EvalOptions& options) {
  if (images.empty()) throw Error(ErrorCode::kValidation, "dataset has no images");
  DatasetEvaluation out;
  for (Task task : kTasks) {
    out.uq[static_cast<std::size_t>(task)].resize(options.thresholds.size());
  }
  for (const ImageEvaluation& img : images) {
    out.confusion += img.confusion;
    out.calibration += img.calibration;
    out.squared_error += img.squared_error;
    out.delta += img.delta;
    for (std::size_t t = 0; t < 2; ++t) {
      for (std::size_t k = 0; k < img.uq[t].size(); ++k) {
        out.uq[t][k] += img.uq[t][k].counts;
      }
    }
  }
  if (options.sweep) {
    SweepResult sweep;
    for (std::size_t t = 0; t < 2; ++t) {
      std::vector<std::vector<UQCounts>> per_image;
      per_image.reserve(images.size());
      for (const ImageEvaluation& img : images) per_image.push_back(img.sweep[t]);
      sweep.curves[t] = merge_sweeps(per_image, options.percentiles);
    }
    out.sweep = std::move(sweep);
  }
  out.images = std::move(images);
  return out;
}

DatasetEvaluation evaluate_manifest(const DatasetManifest& manifest,
                                    const EvalOptions& options) {
  options.validate();
  const std::size_t n = manifest.entries.size();
  if (n == 0) throw Error(ErrorCode::kValidation, "manifest has no entries");
  const DatasetSpec dataset{manifest.num_classes, manifest.ignore_index,
                            manifest.depth_invalid_value};

  std::vector<ImageEvaluation> images(n);
  std::vector<std::exception_ptr> failures(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (count > 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      const LoadedEntry entry = load_entry(manifest, i);
      FusedPrediction fused;
      try {
        fused = fuse(entry.seg, entry.depth, options.fusion);
      } catch (const Error& e) {
        throw Error(e.code(), "image '" + manifest.entries[i].image_id + "': " + e.what());
      }
      images[i] = evaluate_image(manifest.entries[i].image_id, fused, entry.truth,
                                 dataset, options);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return aggregate(std::move(images), options);
}

}  // namespace mtuq
