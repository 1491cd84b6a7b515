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

#ifndef MTUQ_MANIFEST_HPP_
#define MTUQ_MANIFEST_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mtuq/fusion.hpp"
#include "mtuq/numeric.hpp"
#include "mtuq/tensor.hpp"

namespace mtuq {

struct ManifestEntry {
  std::string image_id;
  // Stored as written in the document; relative paths resolve against
  // DatasetManifest::base_dir.
  std::filesystem::path seg_stack_path;
  std::filesystem::path depth_stack_path;
  std::filesystem::path gt_label_path;
  std::filesystem::path gt_depth_path;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::size_t num_classes = 0;
  std::int64_t ignore_index = 255;
  double depth_invalid_value = 0.0;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
  }
};

// Ground truth of one image: class labels (ignore_index marks unlabeled
// pixels) and metric depth (depth_invalid_value marks holes).
struct GroundTruthFrame {
  Grid grid;
  std::vector<std::int32_t> labels;
  std::vector<float> depth;
};

// Parses and fully validates the manifest: every file must exist and carry
// a well-formed header of the expected rank/dtype, every entry must agree
// on C, and H x W must agree within an entry.
//
// JSON fields: num_classes (optional; inferred from the first entry when
// absent), ignore_index (default 255), depth_invalid_value (default 0),
// entries[] with image_id, seg_stack_path, depth_stack_path, gt_label_path,
// gt_depth_path.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Writes the manifest as JSON; paths are written as stored.
void save_manifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest);

struct LoadedEntry {
  SegSampleStack seg;
  DepthSampleStack depth;
  GroundTruthFrame truth;
};

// Loads the four tensors of one entry. Errors carry the image_id.
LoadedEntry load_entry(const DatasetManifest& manifest, std::size_t index);

// Builds a frame from label/depth tensors (labels int32 or uint8).
GroundTruthFrame make_ground_truth(const Tensor& labels, const Tensor& depth);

}  // namespace mtuq

#endif  // MTUQ_MANIFEST_HPP_
