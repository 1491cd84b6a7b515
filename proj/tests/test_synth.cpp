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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "mtuq/error.hpp"
#include "mtuq/fusion.hpp"
#include "mtuq/synth.hpp"

namespace mtuq {
namespace {

SynthConfig small() {
  SynthConfig c;
  c.height = 16;
  c.width = 12;
  c.classes = 4;
  c.samples = 3;
  return c;
}

TEST(CounterRng, DeterministicAndKeyed) {
  CounterRng a(1, 2, 3, 4), b(1, 2, 3, 4), c(1, 2, 4, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  CounterRng u(5, 0, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Synth, DeterministicInSeedAndImage) {
  const SynthConfig c = small();
  const SynthSample a = generate(c, 0), b = generate(c, 0), other = generate(c, 1);
  EXPECT_EQ(a.seg.tensor(), b.seg.tensor());
  EXPECT_EQ(a.depth.tensor(), b.depth.tensor());
  EXPECT_EQ(a.truth.labels, b.truth.labels);
  EXPECT_EQ(a.truth.depth, b.truth.depth);
  EXPECT_NE(a.seg.tensor(), other.seg.tensor());
}

TEST(Synth, OutputsPassFusionValidation) {
  for (auto mode : {SegCalibration::kCalibrated, SegCalibration::kOverconfident,
                    SegCalibration::kUnderconfident}) {
    SynthConfig c = small();
    c.seg_calibration = mode;
    c.gamma = mode == SegCalibration::kOverconfident ? 4.0
              : mode == SegCalibration::kUnderconfident ? 0.5 : 1.0;
    const SynthSample s = generate(c);
    EXPECT_NO_THROW(fuse(s.seg, s.depth));
    EXPECT_EQ(s.seg.samples(), 3u);
    EXPECT_EQ(s.seg.classes(), 4u);
    EXPECT_EQ(s.truth.grid, (Grid{16, 12}));
    for (float d : s.truth.depth) EXPECT_GT(d, 0.0f);
  }
}

TEST(Synth, IgnoreAndInvalidFractions) {
  SynthConfig c = small();
  c.height = c.width = 64;
  c.ignore_fraction = 0.25;
  c.invalid_depth_fraction = 0.5;
  const SynthSample s = generate(c);
  std::size_t ignored = 0, invalid = 0;
  for (auto l : s.truth.labels) ignored += l == 255;
  for (auto d : s.truth.depth) invalid += d == 0.0f;
  EXPECT_NEAR(ignored / 4096.0, 0.25, 0.04);
  EXPECT_NEAR(invalid / 4096.0, 0.5, 0.04);
}

TEST(Synth, BlockyLabelsShareBlockPeak) {
  SynthConfig c = small();
  c.height = c.width = 16;
  c.blocky_labels = true;
  const SynthSample s = generate(c);
  const SegFusion f = fuse_segmentation(s.seg);
  // Averaged over a block, the argmax concentrates on a single class.
  std::vector<int> hist(4, 0);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) ++hist[f.label[y * 16 + x]];
  }
  EXPECT_GT(*std::max_element(hist.begin(), hist.end()), 32);
}

TEST(SynthConfig, ValidationRules) {
  const auto rejects = [](auto mutate) {
    SynthConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), Error);
  };
  rejects([](SynthConfig& c) { c.classes = 0; });
  rejects([](SynthConfig& c) { c.gamma = 2.0; });
  rejects([](SynthConfig& c) {
    c.seg_calibration = SegCalibration::kOverconfident;
    c.gamma = 0.5;
  });
  rejects([](SynthConfig& c) {
    c.seg_calibration = SegCalibration::kUnderconfident;
    c.gamma = 2.0;
  });
  rejects([](SynthConfig& c) { c.depth_noise_sd = 0.0; });
  rejects([](SynthConfig& c) { c.ood_shift = -0.1; });
  rejects([](SynthConfig& c) { c.ignore_fraction = 1.5; });
  rejects([](SynthConfig& c) { c.ignore_index = 2; });
}

TEST(SynthConfig, JsonRoundTripAndStrictKeys) {
  SynthConfig c = small();
  c.seed = 99;
  c.seg_calibration = SegCalibration::kOverconfident;
  c.gamma = 3.0;
  c.ood_shift = 0.2;
  const SynthConfig back = SynthConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  try {
    SynthConfig::from_json(R"({"seed": 1, "colour": "red"})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  EXPECT_THROW(SynthConfig::from_json(R"({"seg_calibration": "wild"})"), Error);
  EXPECT_THROW(SynthConfig::from_json("[1, 2]"), Error);
}

TEST(Synth, WritesLoadableDataset) {
  testing::TempDir dir("synth");
  SynthConfig c = small();
  c.images = 3;
  const DatasetManifest m = write_synthetic_dataset(c, dir.path());
  EXPECT_EQ(m.entries.size(), 3u);
  const DatasetManifest back = load_manifest(dir.path() / "manifest.json");
  EXPECT_EQ(back.num_classes, 4u);
  EXPECT_EQ(back.entries[2].image_id, "img_0002");
  const LoadedEntry e = load_entry(back, 1);
  const SynthSample direct = generate(c, 1);
  EXPECT_EQ(e.seg.tensor(), direct.seg.tensor());
  EXPECT_EQ(e.truth.labels, direct.truth.labels);
}

}  // namespace
}  // namespace mtuq
