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

// Per-image uncertainty thresholds. A pixel is certain iff u < tau; pixels
// exactly at tau count as uncertain.
//
//   mean        arithmetic mean of the scored uncertainties
//   median      lower median
//   robust      median + f * MAD / 0.6745
//   percentile  nearest-rank q-th percentile, rank = ceil(q/100 * N)

#ifndef MTUQ_THRESHOLD_HPP_
#define MTUQ_THRESHOLD_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtuq {

enum class ThresholdKind { kMean, kMedian, kRobust, kPercentile };

inline constexpr double kMadConsistency = 0.6745;

struct ThresholdSpec {
  ThresholdKind kind = ThresholdKind::kMean;
  double f = 2.0;    // robust only
  double q = 50.0;   // percentile only, in (0, 100)
  // Negative f lets the threshold collapse towards zero; it is refused
  // unless this is set.
  bool allow_negative_f = false;

  static ThresholdSpec mean() { return {}; }
  static ThresholdSpec median() { return {ThresholdKind::kMedian}; }
  static ThresholdSpec robust(double f) { return {ThresholdKind::kRobust, f}; }
  static ThresholdSpec percentile(double q) {
    return {ThresholdKind::kPercentile, 2.0, q};
  }

  // Canonical text form: "mean", "median", "robust:f=2", "percentile:q=50".
  std::string to_string() const;
  // Accepts the canonical text form; throws kInvalidParameter otherwise.
  static ThresholdSpec parse(std::string_view text);

  // Throws kInvalidParameter / kUnstableThreshold for invalid parameters.
  void validate() const;

  bool operator==(const ThresholdSpec&) const = default;
};

// Copies the uncertainties of scored pixels (scored[n] != 0), in raster
// order. An empty `scored` span means every pixel is scored.
std::vector<double> scored_values(std::span<const double> u,
                                  std::span<const std::uint8_t> scored);

// Throws kUndefinedMetric when no pixel is scored.
double compute_threshold(std::span<const double> u,
                         std::span<const std::uint8_t> scored,
                         const ThresholdSpec& spec);

// Same statistics on an already-extracted sample (reordered in place).
double lower_median(std::vector<double>& values);
double robust_sigma(std::vector<double> values);
double nearest_rank_percentile(std::vector<double>& values, double q);
// 1-based rank ceil(q/100 * n) clamped to [1, n]; n > 0.
std::size_t nearest_rank(double q, std::size_t n);

struct CertaintyMask {
  std::vector<std::uint8_t> certain;  // 0 on unscored pixels
  double tau = 0.0;
};

CertaintyMask classify(std::span<const double> u,
                       std::span<const std::uint8_t> scored, double tau);

namespace serial {
CertaintyMask classify(std::span<const double> u,
                       std::span<const std::uint8_t> scored, double tau);
}  // namespace serial

}  // namespace mtuq

#endif  // MTUQ_THRESHOLD_HPP_
