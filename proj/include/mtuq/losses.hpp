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

// Scalar reference losses with analytic gradients.

#ifndef MTUQ_LOSSES_HPP_
#define MTUQ_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace mtuq {

inline constexpr double kVarFloor = 1e-6;

struct CrossEntropyResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d probs; only grad[gt] is nonzero
};

// -ln(probs[gt]). Throws kInvalidInput for a bad class or non-finite prob,
// kInfiniteLoss when probs[gt] == 0.
CrossEntropyResult cross_entropy(std::span<const double> probs, std::size_t gt);

struct GnllTerm {
  double y = 0.0;
  double mu = 0.0;
  double var = 1.0;
};

struct GnllResult {
  double loss = 0.0;
  double d_mu = 0.0;
  double d_var = 0.0;   // zero when the floor was applied
  bool floored = false;
};

// 0.5 * ((y - mu)^2 / var + ln var) with var raised to kVarFloor if needed.
GnllResult gnll(GnllTerm term);

// ln(1 + e^x) without overflow; strictly positive for finite x.
double softplus(double x);

// Per-pixel joint objective ce + w1 * gnll.
double joint_loss(double ce, double gnll_loss, double w1 = 1.0);

}  // namespace mtuq

#endif  // MTUQ_LOSSES_HPP_
