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

#ifndef MTUQ_UQ_METRICS_HPP_
#define MTUQ_UQ_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtuq/numeric.hpp"

namespace mtuq {

// Accurate/inaccurate x certain/uncertain contingency counts.
struct UQCounts {
  std::uint64_t n_ac = 0;
  std::uint64_t n_au = 0;
  std::uint64_t n_ic = 0;
  std::uint64_t n_iu = 0;

  std::uint64_t total() const { return n_ac + n_au + n_ic + n_iu; }
  UQCounts& operator+=(const UQCounts& o) {
    n_ac += o.n_ac;
    n_au += o.n_au;
    n_ic += o.n_ic;
    n_iu += o.n_iu;
    return *this;
  }
  bool operator==(const UQCounts&) const = default;
};

// n_ac / (n_ac + n_ic); empty when nothing is certain.
std::optional<double> p_accurate_given_certain(const UQCounts& c);
// n_iu / (n_ic + n_iu); empty when nothing is inaccurate.
std::optional<double> p_uncertain_given_inaccurate(const UQCounts& c);
// (n_ac + n_iu) / total; empty when there are no units.
std::optional<double> pavpu(const UQCounts& c);

// Pixel-level counting over scored pixels. An empty `scored` span scores
// every pixel.
UQCounts count_joint(std::span<const std::uint8_t> accurate,
                     std::span<const std::uint8_t> certain,
                     std::span<const std::uint8_t> scored);

// Evaluation units after window reduction: one entry per scored pixel
// (window 1) or per w x w cell holding at least one scored pixel. A cell's
// uncertainty is the mean over its scored pixels, and it is accurate iff at
// least half of its scored pixels are accurate.
struct UnitSet {
  std::vector<double> uncertainty;
  std::vector<std::uint8_t> accurate;

  std::size_t size() const { return uncertainty.size(); }
};

// Throws kInvalidParameter when window == 0.
UnitSet make_units(const Grid& grid, std::span<const std::uint8_t> accurate,
                   std::span<const double> uncertainty,
                   std::span<const std::uint8_t> scored, std::size_t window);

// Units are certain iff their uncertainty is below tau.
UQCounts count_joint(const UnitSet& units, double tau);

// make_units followed by count_joint; tau is the image threshold computed
// on scored pixels.
UQCounts count_joint(const Grid& grid, std::span<const std::uint8_t> accurate,
                     std::span<const double> uncertainty,
                     std::span<const std::uint8_t> scored, double tau,
                     std::size_t window);

}  // namespace mtuq

#endif  // MTUQ_UQ_METRICS_HPP_
