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

#include "mtuq/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "mtuq/error.hpp"

namespace mtuq {
namespace {

constexpr double kSimplexTolerance = 1e-4;

void require_float_rank4(const Tensor& t, std::string_view role) {
  t.require_rank(4, role);
  if (t.dtype() != DType::kFloat32) {
    throw Error(ErrorCode::kValidation,
                std::string(role) + ": expected float32, got " +
                    std::string(dtype_name(t.dtype())));
  }
  if (t.dim(0) == 0) {
    throw Error(ErrorCode::kEmptyStack, std::string(role) + ": zero samples");
  }
}

std::string pixel_name(std::size_t n, const Grid& grid) {
  return "pixel (" + std::to_string(n / grid.width) + ", " +
         std::to_string(n % grid.width) + ")";
}

// Per-pixel segmentation fusion. `probs` is the full S x C x H x W buffer.
void fuse_seg_pixel(std::span<const float> probs, std::size_t samples,
                    std::size_t classes, std::size_t plane, std::size_t n,
                    const FusionOptions& options, ExactSum& acc,
                    SegFusion& out) {
  const double inv_log_c =
      classes > 1 ? 1.0 / std::log(static_cast<double>(classes)) : 0.0;
  double best = -1.0;
  std::int32_t best_c = 0;
  double entropy = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    acc.clear();
    for (std::size_t s = 0; s < samples; ++s) {
      acc.add(probs[(s * classes + c) * plane + n]);
    }
    const double p = acc.value() / static_cast<double>(samples);
    out.prob[c * plane + n] = p;
    if (p > best) {
      best = p;
      best_c = static_cast<std::int32_t>(c);
    }
    if (p > 0.0) entropy -= p * std::log(p);
  }
  const double max_entropy =
      classes > 1 ? std::log(static_cast<double>(classes)) : 0.0;
  entropy = std::clamp(entropy, 0.0, max_entropy);
  out.label[n] = best_c;
  out.uncertainty[n] = options.normalize_entropy ? entropy * inv_log_c : entropy;
}

void fuse_depth_pixel(const DepthSampleStack& stack, std::size_t n,
                      ExactSum& acc, std::vector<double>& rectified,
                      DepthFusion& out) {
  const std::size_t samples = stack.samples();
  const auto s_count = static_cast<double>(samples);
  rectified.resize(samples);

  acc.clear();
  for (std::size_t s = 0; s < samples; ++s) {
    rectified[s] = std::max(0.0, static_cast<double>(stack.mean(s)[n]));
    acc.add(rectified[s]);
  }
  const double mean = acc.value() / s_count;

  acc.clear();
  for (std::size_t s = 0; s < samples; ++s) acc.add(stack.variance(s)[n]);
  const double aleatoric = acc.value() / s_count;

  // Population variance as the pairwise form sum_{i<j} (r_i - r_j)^2 / S^2.
  // It is exactly zero when all rectified means agree.
  acc.clear();
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = i + 1; j < samples; ++j) {
      const double d = rectified[i] - rectified[j];
      acc.add(d * d);
    }
  }
  const double epistemic = acc.value() / (s_count * s_count);

  out.depth[n] = mean;
  out.aleatoric[n] = aleatoric;
  out.epistemic[n] = epistemic;
  out.total[n] = aleatoric + epistemic;
}

template <bool kParallel>
SegFusion fuse_segmentation_impl(const SegSampleStack& stack,
                                 const FusionOptions& options) {
  validate_seg_stack(stack);
  const Grid grid = stack.grid();
  const std::size_t plane = grid.pixels();
  SegFusion out;
  out.grid = grid;
  out.classes = stack.classes();
  out.prob.resize(out.classes * plane);
  out.label.resize(plane);
  out.uncertainty.resize(plane);
  const auto probs = stack.probs();
  const auto pixels = static_cast<std::ptrdiff_t>(plane);

#pragma omp parallel if (kParallel)
  {
    ExactSum acc;
#pragma omp for schedule(static)
    for (std::ptrdiff_t n = 0; n < pixels; ++n) {
      fuse_seg_pixel(probs, stack.samples(), out.classes, plane,
                     static_cast<std::size_t>(n), options, acc, out);
    }
  }
  return out;
}

template <bool kParallel>
DepthFusion fuse_depth_impl(const DepthSampleStack& stack) {
  validate_depth_stack(stack);
  const Grid grid = stack.grid();
  const std::size_t plane = grid.pixels();
  DepthFusion out;
  out.grid = grid;
  out.depth.resize(plane);
  out.aleatoric.resize(plane);
  out.epistemic.resize(plane);
  out.total.resize(plane);
  const auto pixels = static_cast<std::ptrdiff_t>(plane);

#pragma omp parallel if (kParallel)
  {
    ExactSum acc;
    std::vector<double> rectified;
#pragma omp for schedule(static)
    for (std::ptrdiff_t n = 0; n < pixels; ++n) {
      fuse_depth_pixel(stack, static_cast<std::size_t>(n), acc, rectified, out);
    }
  }
  return out;
}

}  // namespace

SegSampleStack::SegSampleStack(Tensor probs) : tensor_(std::move(probs)) {
  require_float_rank4(tensor_, "segmentation stack");
  if (tensor_.dim(1) == 0) {
    throw Error(ErrorCode::kValidation, "segmentation stack: zero classes");
  }
}

DepthSampleStack::DepthSampleStack(Tensor mean_var)
    : tensor_(std::move(mean_var)) {
  require_float_rank4(tensor_, "depth stack");
  if (tensor_.dim(1) != 2) {
    throw Error(ErrorCode::kValidation,
                "depth stack: expected 2 channels (mean, variance), got " +
                    std::to_string(tensor_.dim(1)));
  }
}

std::span<const float> DepthSampleStack::mean(std::size_t sample) const {
  const std::size_t plane = grid().pixels();
  return tensor_.values<float>().subspan(sample * 2 * plane, plane);
}

std::span<const float> DepthSampleStack::variance(std::size_t sample) const {
  const std::size_t plane = grid().pixels();
  return tensor_.values<float>().subspan((sample * 2 + 1) * plane, plane);
}

void validate_seg_stack(const SegSampleStack& stack) {
  const std::size_t plane = stack.grid().pixels();
  const std::size_t samples = stack.samples();
  const std::size_t classes = stack.classes();
  const auto probs = stack.probs();
  const auto cells = static_cast<std::ptrdiff_t>(samples * plane);
  std::ptrdiff_t first_nan = std::numeric_limits<std::ptrdiff_t>::max();
  std::ptrdiff_t first_bad = std::numeric_limits<std::ptrdiff_t>::max();

#pragma omp parallel for schedule(static) \
    reduction(min : first_nan, first_bad)
  for (std::ptrdiff_t k = 0; k < cells; ++k) {
    const std::size_t s = static_cast<std::size_t>(k) / plane;
    const std::size_t n = static_cast<std::size_t>(k) % plane;
    double sum = 0.0;
    bool in_range = true;
    bool has_nan = false;
    for (std::size_t c = 0; c < classes; ++c) {
      const float p = probs[(s * classes + c) * plane + n];
      if (std::isnan(p)) has_nan = true;
      if (!(p >= 0.0f && p <= 1.0f)) in_range = false;
      sum += p;
    }
    if (has_nan) first_nan = std::min(first_nan, k);
    if (!in_range || std::fabs(sum - 1.0) > kSimplexTolerance) {
      first_bad = std::min(first_bad, k);
    }
  }

  const auto report = [&](std::ptrdiff_t k, std::string_view what) {
    const auto idx = static_cast<std::size_t>(k);
    throw Error(ErrorCode::kInvalidInput,
                "segmentation stack: " + std::string(what) + " at sample " +
                    std::to_string(idx / plane) + ", " +
                    pixel_name(idx % plane, stack.grid()));
  };
  if (first_nan != std::numeric_limits<std::ptrdiff_t>::max()) {
    report(first_nan, "NaN probability");
  }
  if (first_bad != std::numeric_limits<std::ptrdiff_t>::max()) {
    report(first_bad, "probabilities outside [0,1] or not summing to 1");
  }
}

void validate_depth_stack(const DepthSampleStack& stack) {
  const auto values = stack.tensor().values<float>();
  const std::size_t plane = stack.grid().pixels();
  const auto count = static_cast<std::ptrdiff_t>(values.size());
  std::ptrdiff_t first_bad = std::numeric_limits<std::ptrdiff_t>::max();

#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const float v = values[static_cast<std::size_t>(k)];
    const bool is_variance = (static_cast<std::size_t>(k) / plane) % 2 == 1;
    if (!std::isfinite(v) || (is_variance && v < 0.0f)) {
      first_bad = std::min(first_bad, k);
    }
  }
  if (first_bad != std::numeric_limits<std::ptrdiff_t>::max()) {
    const auto idx = static_cast<std::size_t>(first_bad);
    const bool is_variance = (idx / plane) % 2 == 1;
    const float v = values[idx];
    std::string what = std::isnan(v)        ? "NaN"
                       : !std::isfinite(v)  ? "non-finite value"
                                            : "negative variance";
    throw Error(ErrorCode::kInvalidInput,
                "depth stack: " + what + (is_variance ? " (variance)" : " (mean)") +
                    " at sample " + std::to_string(idx / (2 * plane)) + ", " +
                    pixel_name(idx % plane, stack.grid()));
  }
}

SegFusion fuse_segmentation(const SegSampleStack& stack,
                            const FusionOptions& options) {
  return fuse_segmentation_impl<true>(stack, options);
}

DepthFusion fuse_depth(const DepthSampleStack& stack) {
  return fuse_depth_impl<true>(stack);
}

FusedPrediction fuse(const SegSampleStack& seg, const DepthSampleStack& depth,
                     const FusionOptions& options) {
  if (seg.grid() != depth.grid()) {
    throw Error(ErrorCode::kValidation,
                "segmentation and depth stacks disagree on H x W");
  }
  return {fuse_segmentation(seg, options), fuse_depth(depth)};
}

namespace serial {

SegFusion fuse_segmentation(const SegSampleStack& stack,
                            const FusionOptions& options) {
  return fuse_segmentation_impl<false>(stack, options);
}

DepthFusion fuse_depth(const DepthSampleStack& stack) {
  return fuse_depth_impl<false>(stack);
}

}  // namespace serial
}  // namespace mtuq
