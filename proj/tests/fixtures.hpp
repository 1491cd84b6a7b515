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

// Temporary on-disk datasets for tests.

#ifndef MTUQ_TESTS_FIXTURES_HPP_
#define MTUQ_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "mtuq/manifest.hpp"
#include "mtuq/tensor.hpp"

namespace mtuq::testing {

// Unique directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mtuq_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline ManifestEntry write_entry(const std::filesystem::path& dir, const std::string& id,
                                 const Tensor& seg, const Tensor& depth, const Tensor& labels,
                                 const Tensor& gt_depth) {
  ManifestEntry e{id, id + "_seg.npy", id + "_depth.npy", id + "_labels.npy",
                  id + "_gt_depth.npy"};
  save_tensor(dir / e.seg_stack_path, seg);
  save_tensor(dir / e.depth_stack_path, depth);
  save_tensor(dir / e.gt_label_path, labels);
  save_tensor(dir / e.gt_depth_path, gt_depth);
  return e;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace mtuq::testing

#endif  // MTUQ_TESTS_FIXTURES_HPP_
