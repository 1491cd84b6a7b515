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

#include "mtuq/seg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mtuq/error.hpp"

namespace mtuq {
namespace {

constexpr auto kNone = std::numeric_limits<std::ptrdiff_t>::max();

void check_sizes(std::span<const std::int32_t> pred,
                 std::span<const std::int32_t> gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kValidation,
                "prediction and ground truth label maps differ in size");
  }
}

bool label_ok(std::int32_t label, std::size_t classes) {
  return label >= 0 && static_cast<std::size_t>(label) < classes;
}

[[noreturn]] void bad_label(std::span<const std::int32_t> pred,
                            std::span<const std::int32_t> gt,
                            std::size_t classes, std::int64_t ignore_index,
                            std::size_t n) {
  const bool gt_ignored = gt[n] == ignore_index;
  const bool pred_bad = !label_ok(pred[n], classes);
  const std::string which = (!gt_ignored && !label_ok(gt[n], classes) && !pred_bad)
                                ? "ground-truth label " + std::to_string(gt[n])
                                : "predicted label " + std::to_string(pred[n]);
  throw Error(ErrorCode::kInvalidLabel,
              which + " at pixel " + std::to_string(n) + " is outside [0, " +
                  std::to_string(classes) + ")");
}

template <bool kParallel>
ConfusionMatrix accumulate_impl(std::span<const std::int32_t> pred,
                                std::span<const std::int32_t> gt,
                                std::size_t classes, std::int64_t ignore_index) {
  check_sizes(pred, gt);
  ConfusionMatrix total(classes);
  std::ptrdiff_t first_bad = kNone;
  const auto n_pixels = static_cast<std::ptrdiff_t>(pred.size());

#pragma omp parallel if (kParallel) reduction(min : first_bad)
  {
    ConfusionMatrix local(classes);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n_pixels; ++k) {
      const auto n = static_cast<std::size_t>(k);
      const bool pred_ok = label_ok(pred[n], classes);
      if (gt[n] == ignore_index) {
        if (!pred_ok) first_bad = std::min(first_bad, k);
        continue;
      }
      if (!pred_ok || !label_ok(gt[n], classes)) {
        first_bad = std::min(first_bad, k);
        continue;
      }
      local.add(static_cast<std::size_t>(gt[n]), static_cast<std::size_t>(pred[n]));
    }
#pragma omp critical(mtuq_confusion_merge)
    total += local;
  }
  if (first_bad != kNone) {
    bad_label(pred, gt, classes, ignore_index, static_cast<std::size_t>(first_bad));
  }
  return total;
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::optional<double> ConfusionMatrix::iou(std::size_t c) const {
  std::uint64_t row = 0;
  std::uint64_t col = 0;
  for (std::size_t k = 0; k < classes_; ++k) {
    row += at(c, k);
    col += at(k, c);
  }
  const std::uint64_t tp = at(c, c);
  const std::uint64_t uni = row + col - tp;
  if (uni == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(uni);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (classes_ == 0 && counts_.empty()) {
    *this = other;
    return *this;
  }
  if (other.classes_ != classes_) {
    throw Error(ErrorCode::kValidation, "cannot merge confusion matrices of different C");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix accumulate_confusion(std::span<const std::int32_t> pred,
                                     std::span<const std::int32_t> gt,
                                     std::size_t classes,
                                     std::int64_t ignore_index) {
  return accumulate_impl<true>(pred, gt, classes, ignore_index);
}

namespace serial {
ConfusionMatrix accumulate_confusion(std::span<const std::int32_t> pred,
                                     std::span<const std::int32_t> gt,
                                     std::size_t classes,
                                     std::int64_t ignore_index) {
  return accumulate_impl<false>(pred, gt, classes, ignore_index);
}
}  // namespace serial

double miou(const ConfusionMatrix& matrix) {
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < matrix.classes(); ++c) {
    if (const auto v = matrix.iou(c)) {
      sum += *v;
      ++present;
    }
  }
  if (present == 0) {
    throw Error(ErrorCode::kUndefinedMetric, "mIoU undefined: no class has a non-empty union");
  }
  return sum / static_cast<double>(present);
}

CalibrationBins::CalibrationBins(std::size_t bins)
    : count_(bins, 0), correct_(bins, 0), confidence_sum_(bins, 0.0) {
  if (bins == 0) {
    throw Error(ErrorCode::kInvalidParameter, "ECE needs at least one bin");
  }
}

std::size_t CalibrationBins::bin_of(double confidence) const {
  const std::size_t last = bins() - 1;
  if (!(confidence > 0.0)) return 0;
  if (confidence >= 1.0) return last;
  const double scaled = std::ceil(confidence * static_cast<double>(bins()));
  auto b = static_cast<std::size_t>(std::clamp(scaled, 1.0, static_cast<double>(bins()))) - 1;
  // Fix up rounding in confidence * B against the exact edges.
  if (b > 0 && confidence <= edge(b)) --b;
  if (b < last && confidence > edge(b + 1)) ++b;
  return b;
}

void CalibrationBins::add(double confidence, bool correct) {
  const std::size_t b = bin_of(confidence);
  ++count_[b];
  correct_[b] += correct ? 1 : 0;
  confidence_sum_[b] += confidence;
}

CalibrationBins& CalibrationBins::operator+=(const CalibrationBins& other) {
  if (count_.empty()) {
    *this = other;
    return *this;
  }
  if (other.bins() != bins()) {
    throw Error(ErrorCode::kValidation, "cannot merge calibration bins of different B");
  }
  for (std::size_t b = 0; b < bins(); ++b) {
    count_[b] += other.count_[b];
    correct_[b] += other.correct_[b];
    confidence_sum_[b] += other.confidence_sum_[b];
  }
  return *this;
}

std::uint64_t CalibrationBins::total() const {
  return std::accumulate(count_.begin(), count_.end(), std::uint64_t{0});
}

double CalibrationBins::ece() const {
  const std::uint64_t n = total();
  if (n == 0) throw Error(ErrorCode::kUndefinedMetric, "ECE undefined: no scored pixels");
  // (n_b / N) |acc_b - conf_b| == |correct_b - conf_sum_b| / N
  double gap = 0.0;
  for (std::size_t b = 0; b < bins(); ++b) {
    gap += std::fabs(static_cast<double>(correct_[b]) - confidence_sum_[b]);
  }
  return gap / static_cast<double>(n);
}

CalibrationBins accumulate_calibration(std::span<const double> seg_prob,
                                       std::span<const std::int32_t> pred,
                                       std::span<const std::int32_t> gt,
                                       std::size_t classes,
                                       std::int64_t ignore_index,
                                       std::size_t bins) {
  check_sizes(pred, gt);
  const std::size_t plane = gt.size();
  if (seg_prob.size() != classes * plane) {
    throw Error(ErrorCode::kValidation, "probability field is not C x H x W");
  }
  CalibrationBins out(bins);
  for (std::size_t n = 0; n < plane; ++n) {
    if (gt[n] == ignore_index) continue;
    if (!label_ok(pred[n], classes) || !label_ok(gt[n], classes)) {
      bad_label(pred, gt, classes, ignore_index, n);
    }
    const double confidence = seg_prob[static_cast<std::size_t>(pred[n]) * plane + n];
    out.add(confidence, pred[n] == gt[n]);
  }
  return out;
}

double ece(std::span<const double> seg_prob, std::span<const std::int32_t> gt,
           std::size_t classes, std::int64_t ignore_index, std::size_t bins) {
  const std::size_t plane = gt.size();
  if (seg_prob.size() != classes * plane) {
    throw Error(ErrorCode::kValidation, "probability field is not C x H x W");
  }
  std::vector<std::int32_t> pred(plane, 0);
  for (std::size_t n = 0; n < plane; ++n) {
    double best = -1.0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (seg_prob[c * plane + n] > best) {
        best = seg_prob[c * plane + n];
        pred[n] = static_cast<std::int32_t>(c);
      }
    }
  }
  return accumulate_calibration(seg_prob, pred, gt, classes, ignore_index, bins).ece();
}

}  // namespace mtuq
