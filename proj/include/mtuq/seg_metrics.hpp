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

#ifndef MTUQ_SEG_METRICS_HPP_
#define MTUQ_SEG_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mtuq {

inline constexpr std::size_t kDefaultEceBins = 15;

// Rows are ground truth, columns prediction.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes)
      : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return classes_; }
  std::uint64_t at(std::size_t gt, std::size_t pred) const {
    return counts_[gt * classes_ + pred];
  }
  void add(std::size_t gt, std::size_t pred, std::uint64_t n = 1) {
    counts_[gt * classes_ + pred] += n;
  }
  std::uint64_t total() const;

  // IoU of one class; empty when the class has zero union.
  std::optional<double> iou(std::size_t c) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Pixels whose gt equals ignore_index are skipped. Out-of-range predicted or
// ground-truth labels throw kInvalidLabel. Parallel over pixels; integer
// counts make the result independent of the thread count.
ConfusionMatrix accumulate_confusion(std::span<const std::int32_t> pred,
                                     std::span<const std::int32_t> gt,
                                     std::size_t classes,
                                     std::int64_t ignore_index);

namespace serial {
ConfusionMatrix accumulate_confusion(std::span<const std::int32_t> pred,
                                     std::span<const std::int32_t> gt,
                                     std::size_t classes,
                                     std::int64_t ignore_index);
}  // namespace serial

// Mean IoU over classes with non-zero union. Throws kUndefinedMetric if no
// class has a union.
double miou(const ConfusionMatrix& matrix);

// Equal-width confidence bins on [0, 1]. Bin b holds (b/B, (b+1)/B]; a
// confidence of exactly 0 goes to bin 0.
class CalibrationBins {
 public:
  CalibrationBins() = default;
  // Throws kInvalidParameter when bins == 0.
  explicit CalibrationBins(std::size_t bins);

  std::size_t bins() const { return count_.size(); }
  std::size_t bin_of(double confidence) const;
  double edge(std::size_t b) const {
    return static_cast<double>(b) / static_cast<double>(bins());
  }

  void add(double confidence, bool correct);
  CalibrationBins& operator+=(const CalibrationBins& other);

  std::uint64_t count(std::size_t b) const { return count_[b]; }
  std::uint64_t correct(std::size_t b) const { return correct_[b]; }
  double confidence_sum(std::size_t b) const { return confidence_sum_[b]; }
  std::uint64_t total() const;

  // sum_b (n_b / N) |acc_b - conf_b|; throws kUndefinedMetric when empty.
  double ece() const;

 private:
  std::vector<std::uint64_t> count_;
  std::vector<std::uint64_t> correct_;
  std::vector<double> confidence_sum_;
};

// Confidence is the probability of the predicted (argmax) label;
// `seg_prob` is C x H x W. Serial so that the floating-point sums are
// reproducible.
CalibrationBins accumulate_calibration(std::span<const double> seg_prob,
                                       std::span<const std::int32_t> pred,
                                       std::span<const std::int32_t> gt,
                                       std::size_t classes,
                                       std::int64_t ignore_index,
                                       std::size_t bins);

// Convenience: bins one image and returns its ECE. Argmax uses the lowest
// index on ties.
double ece(std::span<const double> seg_prob, std::span<const std::int32_t> gt,
           std::size_t classes, std::int64_t ignore_index,
           std::size_t bins = kDefaultEceBins);

}  // namespace mtuq

#endif  // MTUQ_SEG_METRICS_HPP_
