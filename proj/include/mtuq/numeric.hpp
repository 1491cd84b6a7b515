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

#ifndef MTUQ_NUMERIC_HPP_
#define MTUQ_NUMERIC_HPP_

#include <cstddef>
#include <vector>

namespace mtuq {

// Correctly rounded sum of a sequence of doubles (Shewchuk partials with
// half-even correction on the final rounding). The result is the exact sum
// rounded once, so it does not depend on the order of the terms.
class ExactSum {
 public:
  void add(double x);
  double value() const;
  void clear() {
    partials_.clear();
    special_ = 0.0;
    has_special_ = false;
  }

 private:
  std::vector<double> partials_;
  double special_ = 0.0;  // running sum of non-finite terms
  bool has_special_ = false;
};

template <typename It>
double exact_sum(It first, It last) {
  ExactSum acc;
  for (; first != last; ++first) acc.add(static_cast<double>(*first));
  return acc.value();
}

// Height x width of a single image; all per-pixel maps are row-major.
struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t pixels() const { return height * width; }
  bool operator==(const Grid&) const = default;
};

}  // namespace mtuq

#endif  // MTUQ_NUMERIC_HPP_
