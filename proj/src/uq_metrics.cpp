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

#include "mtuq/uq_metrics.hpp"

#include <algorithm>

#include "mtuq/error.hpp"

namespace mtuq {
namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void tally(UQCounts& c, bool accurate, bool certain) {
  if (accurate) {
    certain ? ++c.n_ac : ++c.n_au;
  } else {
    certain ? ++c.n_ic : ++c.n_iu;
  }
}

}  // namespace

std::optional<double> p_accurate_given_certain(const UQCounts& c) {
  return ratio(c.n_ac, c.n_ac + c.n_ic);
}

std::optional<double> p_uncertain_given_inaccurate(const UQCounts& c) {
  return ratio(c.n_iu, c.n_ic + c.n_iu);
}

std::optional<double> pavpu(const UQCounts& c) {
  return ratio(c.n_ac + c.n_iu, c.total());
}

UQCounts count_joint(std::span<const std::uint8_t> accurate,
                     std::span<const std::uint8_t> certain,
                     std::span<const std::uint8_t> scored) {
  if (accurate.size() != certain.size() ||
      (!scored.empty() && scored.size() != accurate.size())) {
    throw Error(ErrorCode::kValidation, "accuracy, certainty and scored masks differ in size");
  }
  UQCounts c;
  for (std::size_t n = 0; n < accurate.size(); ++n) {
    if (!scored.empty() && !scored[n]) continue;
    tally(c, accurate[n] != 0, certain[n] != 0);
  }
  return c;
}

UnitSet make_units(const Grid& grid, std::span<const std::uint8_t> accurate,
                   std::span<const double> uncertainty,
                   std::span<const std::uint8_t> scored, std::size_t window) {
  if (window == 0) {
    throw Error(ErrorCode::kInvalidParameter, "window must be a positive integer");
  }
  const std::size_t n_pixels = grid.pixels();
  if (accurate.size() != n_pixels || uncertainty.size() != n_pixels ||
      (!scored.empty() && scored.size() != n_pixels)) {
    throw Error(ErrorCode::kValidation, "masks do not match the image grid");
  }
  const auto is_scored = [&](std::size_t n) { return scored.empty() || scored[n] != 0; };

  UnitSet units;
  if (window == 1) {
    for (std::size_t n = 0; n < n_pixels; ++n) {
      if (!is_scored(n)) continue;
      units.uncertainty.push_back(uncertainty[n]);
      units.accurate.push_back(accurate[n] != 0);
    }
    return units;
  }

  for (std::size_t r0 = 0; r0 < grid.height; r0 += window) {
    for (std::size_t c0 = 0; c0 < grid.width; c0 += window) {
      const std::size_t r1 = std::min(grid.height, r0 + window);
      const std::size_t c1 = std::min(grid.width, c0 + window);
      std::size_t n_scored = 0;
      std::size_t n_accurate = 0;
      double u_sum = 0.0;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          const std::size_t n = r * grid.width + c;
          if (!is_scored(n)) continue;
          ++n_scored;
          n_accurate += accurate[n] != 0;
          u_sum += uncertainty[n];
        }
      }
      if (n_scored == 0) continue;
      units.uncertainty.push_back(u_sum / static_cast<double>(n_scored));
      units.accurate.push_back(2 * n_accurate >= n_scored);
    }
  }
  return units;
}

UQCounts count_joint(const UnitSet& units, double tau) {
  UQCounts c;
  for (std::size_t i = 0; i < units.size(); ++i) {
    tally(c, units.accurate[i] != 0, units.uncertainty[i] < tau);
  }
  return c;
}

UQCounts count_joint(const Grid& grid, std::span<const std::uint8_t> accurate,
                     std::span<const double> uncertainty,
                     std::span<const std::uint8_t> scored, double tau,
                     std::size_t window) {
  return count_joint(make_units(grid, accurate, uncertainty, scored, window), tau);
}

}  // namespace mtuq
