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

// Synthetic prediction stacks with known calibration.
//
// Every pixel draws a latent difficulty. Segmentation samples are softmaxes
// of noisy logits whose peak strength falls with difficulty; the label is
// drawn from the mean of the (unsharpened) samples, so "calibrated" output
// is calibrated by construction and over/underconfident output is the same
// field sharpened by a power gamma. Depth samples scatter around a centre
// with a relative spread that grows with difficulty; ground truth is drawn
// from a Gaussian with the fused mean and fused total variance.
//
// With uncertainty_informative = false the emitted spread is driven by an
// independent difficulty. ood_shift adds a relative bias to every depth
// sample and replaces labels with uniform noise at rate min(1, shift); the
// emitted uncertainties do not react.

#ifndef MTUQ_SYNTH_HPP_
#define MTUQ_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "mtuq/fusion.hpp"
#include "mtuq/manifest.hpp"

namespace mtuq {

enum class SegCalibration { kCalibrated, kOverconfident, kUnderconfident };

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t images = 1;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t classes = 5;
  std::size_t samples = 5;
  SegCalibration seg_calibration = SegCalibration::kCalibrated;
  double gamma = 1.0;           // sharpening power; >1 over-, <1 underconfident
  double depth_noise_sd = 0.1;  // relative depth noise scale
  bool uncertainty_informative = true;
  double ood_shift = 0.0;
  bool blocky_labels = false;   // 8 x 8 blocks share their peak class
  double ignore_fraction = 0.0;
  double invalid_depth_fraction = 0.0;
  std::int32_t ignore_index = 255;

  // Throws kValidation.
  void validate() const;

  // Strict JSON: unknown keys are rejected (kFormat).
  static SynthConfig from_json(const std::string& text);
  static SynthConfig load(const std::filesystem::path& path);
  std::string to_json() const;
};

struct SynthSample {
  SegSampleStack seg;
  DepthSampleStack depth;
  GroundTruthFrame truth;
};

// Deterministic in (config, image); independent of the thread count.
SynthSample generate(const SynthConfig& config, std::size_t image = 0);

// Writes config.images entries (NPY) plus manifest.json into out_dir.
DatasetManifest write_synthetic_dataset(const SynthConfig& config,
                                        const std::filesystem::path& out_dir);

// Counter-based generator keyed by (seed, image, pixel, stream).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t image, std::uint64_t pixel,
             std::uint64_t stream = 0);

  std::uint64_t next();
  double uniform();        // [0, 1)
  double uniform_open();   // (0, 1)
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mtuq

#endif  // MTUQ_SYNTH_HPP_
