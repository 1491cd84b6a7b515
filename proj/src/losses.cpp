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

#include "mtuq/losses.hpp"

#include <cmath>
#include <string>

#include "mtuq/error.hpp"

namespace mtuq {

CrossEntropyResult cross_entropy(std::span<const double> probs, std::size_t gt) {
  if (gt >= probs.size()) {
    throw Error(ErrorCode::kInvalidLabel, "class " + std::to_string(gt) + " out of range");
  }
  const double p = probs[gt];
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(ErrorCode::kInvalidInput, "probability outside [0, 1]");
  }
  if (p == 0.0) throw Error(ErrorCode::kInfiniteLoss, "probability of the true class is 0");
  CrossEntropyResult out;
  out.loss = -std::log(p);
  out.grad.assign(probs.size(), 0.0);
  out.grad[gt] = -1.0 / p;
  return out;
}

GnllResult gnll(GnllTerm term) {
  if (!std::isfinite(term.y) || !std::isfinite(term.mu) || std::isnan(term.var)) {
    throw Error(ErrorCode::kInvalidInput, "non-finite GNLL input");
  }
  GnllResult out;
  double var = term.var;
  if (var < kVarFloor) {
    var = kVarFloor;
    out.floored = true;
  }
  const double r = term.y - term.mu;
  out.loss = 0.5 * (r * r / var + std::log(var));
  out.d_mu = -r / var;
  out.d_var = out.floored ? 0.0 : 0.5 * (1.0 / var - r * r / (var * var));
  return out;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double joint_loss(double ce, double gnll_loss, double w1) { return ce + w1 * gnll_loss; }

}  // namespace mtuq
