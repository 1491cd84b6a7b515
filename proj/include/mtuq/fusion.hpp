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

// Fusion of S prediction samples (ensemble members, dropout passes, sub-
// ensemble heads) into a point prediction plus per-pixel uncertainty.
//
// Segmentation: mean class probability, argmax label (lowest index wins
// ties) and the entropy of the mean distribution.
//
// Depth: every sample mean goes through ReLU first. The fused depth is the
// mean of the rectified means, the aleatoric part is the mean predicted
// variance, the epistemic part is the population variance of the rectified
// means, and the total is their sum.
//
// Sums over samples are correctly rounded, so every fused value is an exact
// function of the sample multiset: permuting or replicating the samples
// reproduces the outputs bit for bit.

#ifndef MTUQ_FUSION_HPP_
#define MTUQ_FUSION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mtuq/numeric.hpp"
#include "mtuq/tensor.hpp"

namespace mtuq {

// S x C x H x W float32 class probabilities.
class SegSampleStack {
 public:
  // Throws kValidation on wrong rank/dtype, kEmptyStack when S == 0.
  explicit SegSampleStack(Tensor probs);

  std::size_t samples() const { return tensor_.dim(0); }
  std::size_t classes() const { return tensor_.dim(1); }
  Grid grid() const { return {tensor_.dim(2), tensor_.dim(3)}; }
  std::span<const float> probs() const { return tensor_.values<float>(); }
  const Tensor& tensor() const { return tensor_; }

 private:
  Tensor tensor_;
};

// S x 2 x H x W float32: channel 0 is the predicted mean, channel 1 the
// predicted variance.
class DepthSampleStack {
 public:
  explicit DepthSampleStack(Tensor mean_var);

  std::size_t samples() const { return tensor_.dim(0); }
  Grid grid() const { return {tensor_.dim(2), tensor_.dim(3)}; }
  std::span<const float> mean(std::size_t sample) const;
  std::span<const float> variance(std::size_t sample) const;
  const Tensor& tensor() const { return tensor_; }

 private:
  Tensor tensor_;
};

struct FusionOptions {
  // Divide entropy by ln C so it lies in [0, 1].
  bool normalize_entropy = false;
};

struct SegFusion {
  Grid grid;
  std::size_t classes = 0;
  std::vector<double> prob;           // C x H x W
  std::vector<std::int32_t> label;    // H x W
  std::vector<double> uncertainty;    // H x W entropy
};

struct DepthFusion {
  Grid grid;
  std::vector<double> depth;
  std::vector<double> aleatoric;
  std::vector<double> epistemic;
  std::vector<double> total;
};

struct FusedPrediction {
  SegFusion seg;
  DepthFusion depth;
};

// OpenMP kernels, parallel over pixels. Results are identical for every
// thread count.
SegFusion fuse_segmentation(const SegSampleStack& stack,
                            const FusionOptions& options = {});
DepthFusion fuse_depth(const DepthSampleStack& stack);
FusedPrediction fuse(const SegSampleStack& seg, const DepthSampleStack& depth,
                     const FusionOptions& options = {});

// Single-threaded references sharing the per-pixel math; tests hold the
// parallel kernels to bitwise equality with these.
namespace serial {
SegFusion fuse_segmentation(const SegSampleStack& stack,
                            const FusionOptions& options = {});
DepthFusion fuse_depth(const DepthSampleStack& stack);
}  // namespace serial

// Checks the probability-stack invariants (finite, in [0,1], per-sample
// simplex within 1e-4). Throws kInvalidInput naming the first bad pixel.
void validate_seg_stack(const SegSampleStack& stack);
// Checks finiteness and non-negative variance. Throws kInvalidInput.
void validate_depth_stack(const DepthSampleStack& stack);

}  // namespace mtuq

#endif  // MTUQ_FUSION_HPP_
