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

#include "mtuq/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtuq/error.hpp"

namespace mtuq {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void rethrow_with_id(const std::string& image_id, const Error& e) {
  throw Error(e.code(), "image '" + image_id + "': " + e.what());
}

std::string string_field(const json& obj, const char* key, std::size_t index) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kFormat, "manifest entry " + std::to_string(index) +
                                        ": missing string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

void check_image_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." ||
      id.find_first_of("/\\") != std::string::npos) {
    throw Error(ErrorCode::kValidation,
                "manifest: image_id '" + id +
                    "' must be a non-empty name without path separators");
  }
}

NpyHeader header_of(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo, path.string() + ": file does not exist");
  }
  return read_npy_header(path);
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kValidation, what);
}

// Returns the segmentation class count of the entry.
std::size_t validate_entry(const DatasetManifest& m, const ManifestEntry& e) {
  const NpyHeader seg = header_of(m.resolve(e.seg_stack_path));
  const NpyHeader depth = header_of(m.resolve(e.depth_stack_path));
  const NpyHeader labels = header_of(m.resolve(e.gt_label_path));
  const NpyHeader gt_depth = header_of(m.resolve(e.gt_depth_path));

  expect(seg.shape.size() == 4 && seg.dtype == DType::kFloat32,
         "seg_stack must be a float32 S x C x H x W tensor");
  expect(depth.shape.size() == 4 && depth.dtype == DType::kFloat32 &&
             depth.shape[1] == 2,
         "depth_stack must be a float32 S x 2 x H x W tensor");
  expect(labels.shape.size() == 2 &&
             (labels.dtype == DType::kInt32 || labels.dtype == DType::kUInt8),
         "gt_label must be an int32 or uint8 H x W tensor");
  expect(gt_depth.shape.size() == 2 && gt_depth.dtype == DType::kFloat32,
         "gt_depth must be a float32 H x W tensor");
  expect(seg.shape[0] > 0 && depth.shape[0] > 0, "stacks need at least one sample");

  const std::vector<std::size_t> hw{seg.shape[2], seg.shape[3]};
  expect(std::vector<std::size_t>{depth.shape[2], depth.shape[3]} == hw &&
             labels.shape == hw && gt_depth.shape == hw,
         "H x W differs between the entry's tensors");
  return seg.shape[1];
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open manifest");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw Error(ErrorCode::kFormat, path.string() + ": expected an object with 'entries'");
  }

  DatasetManifest m;
  m.base_dir = path.parent_path();
  try {
    if (doc.contains("ignore_index")) m.ignore_index = doc["ignore_index"].get<std::int64_t>();
    if (doc.contains("depth_invalid_value")) {
      m.depth_invalid_value = doc["depth_invalid_value"].get<double>();
    }
    if (doc.contains("num_classes")) {
      const auto c = doc["num_classes"].get<std::int64_t>();
      if (c <= 0) throw Error(ErrorCode::kValidation, "manifest: num_classes must be positive");
      m.num_classes = static_cast<std::size_t>(c);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }

  std::set<std::string> seen;
  std::size_t index = 0;
  for (const auto& item : doc["entries"]) {
    if (!item.is_object()) {
      throw Error(ErrorCode::kFormat, "manifest entry " + std::to_string(index) +
                                          ": expected an object");
    }
    ManifestEntry e;
    e.image_id = string_field(item, "image_id", index);
    e.seg_stack_path = string_field(item, "seg_stack_path", index);
    e.depth_stack_path = string_field(item, "depth_stack_path", index);
    e.gt_label_path = string_field(item, "gt_label_path", index);
    e.gt_depth_path = string_field(item, "gt_depth_path", index);
    check_image_id(e.image_id);
    if (!seen.insert(e.image_id).second) {
      throw Error(ErrorCode::kValidation, "manifest: duplicate image_id '" + e.image_id + "'");
    }
    std::size_t classes = 0;
    try {
      classes = validate_entry(m, e);
    } catch (const Error& err) {
      rethrow_with_id(e.image_id, err);
    }
    if (m.num_classes == 0) m.num_classes = classes;
    if (classes != m.num_classes) {
      throw Error(ErrorCode::kValidation,
                  "image '" + e.image_id + "': " + std::to_string(classes) +
                      " classes, but the manifest uses C = " +
                      std::to_string(m.num_classes));
    }
    m.entries.push_back(std::move(e));
    ++index;
  }
  return m;
}

void save_manifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest) {
  json doc;
  doc["num_classes"] = manifest.num_classes;
  doc["ignore_index"] = manifest.ignore_index;
  doc["depth_invalid_value"] = manifest.depth_invalid_value;
  doc["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    doc["entries"].push_back({{"image_id", e.image_id},
                              {"seg_stack_path", e.seg_stack_path.generic_string()},
                              {"depth_stack_path", e.depth_stack_path.generic_string()},
                              {"gt_label_path", e.gt_label_path.generic_string()},
                              {"gt_depth_path", e.gt_depth_path.generic_string()}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, path.string() + ": write failed");
}

GroundTruthFrame make_ground_truth(const Tensor& labels, const Tensor& depth) {
  labels.require_rank(2, "gt_label");
  depth.require_rank(2, "gt_depth");
  if (labels.shape() != depth.shape()) {
    throw Error(ErrorCode::kValidation, "gt_label and gt_depth differ in H x W");
  }
  GroundTruthFrame frame;
  frame.grid = {labels.dim(0), labels.dim(1)};
  if (labels.dtype() == DType::kInt32) {
    const auto v = labels.values<std::int32_t>();
    frame.labels.assign(v.begin(), v.end());
  } else if (labels.dtype() == DType::kUInt8) {
    const auto v = labels.values<std::uint8_t>();
    frame.labels.assign(v.begin(), v.end());
  } else {
    throw Error(ErrorCode::kValidation, "gt_label must be int32 or uint8");
  }
  const auto d = depth.values<float>();
  frame.depth.assign(d.begin(), d.end());
  return frame;
}

LoadedEntry load_entry(const DatasetManifest& manifest, std::size_t index) {
  const ManifestEntry& e = manifest.entries.at(index);
  try {
    SegSampleStack seg(load_tensor(manifest.resolve(e.seg_stack_path)));
    DepthSampleStack depth(load_tensor(manifest.resolve(e.depth_stack_path)));
    GroundTruthFrame truth =
        make_ground_truth(load_tensor(manifest.resolve(e.gt_label_path)),
                          load_tensor(manifest.resolve(e.gt_depth_path)));
    if (seg.classes() != manifest.num_classes) {
      throw Error(ErrorCode::kValidation, "class count differs from manifest");
    }
    if (seg.grid() != truth.grid || depth.grid() != truth.grid) {
      throw Error(ErrorCode::kValidation, "H x W differs between the entry's tensors");
    }
    return {std::move(seg), std::move(depth), std::move(truth)};
  } catch (const Error& err) {
    rethrow_with_id(e.image_id, err);
  }
}

}  // namespace mtuq
