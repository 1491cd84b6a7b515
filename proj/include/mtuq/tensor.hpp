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

#ifndef MTUQ_TENSOR_HPP_
#define MTUQ_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mtuq {

enum class DType { kFloat32, kInt32, kUInt8 };

std::string_view dtype_name(DType dtype);

// Dense row-major tensor as stored on disk. Values are kept exactly as read;
// nothing at this layer normalizes, clamps or converts.
class Tensor {
 public:
  using Storage = std::variant<std::vector<float>, std::vector<std::int32_t>,
                               std::vector<std::uint8_t>>;

  Tensor() = default;
  // Throws kValidation when product(shape) != data size.
  Tensor(std::vector<std::size_t> shape, Storage data);

  template <typename T>
  static Tensor from(std::vector<std::size_t> shape, std::vector<T> values) {
    return Tensor(std::move(shape), Storage(std::move(values)));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const;
  DType dtype() const;

  // Typed view; throws kValidation if T does not match the stored dtype.
  template <typename T>
  std::span<const T> values() const;

  const Storage& storage() const { return data_; }

  // Throws kValidation unless rank() == expected; `role` names the tensor in
  // the error message.
  void require_rank(std::size_t expected, std::string_view role) const;

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::size_t> shape_;
  Storage data_;
};

extern template std::span<const float> Tensor::values<float>() const;
extern template std::span<const std::int32_t> Tensor::values<std::int32_t>()
    const;
extern template std::span<const std::uint8_t> Tensor::values<std::uint8_t>()
    const;

// Header-only view of an NPY file, used to validate manifests without
// reading payloads.
struct NpyHeader {
  std::vector<std::size_t> shape;
  DType dtype = DType::kFloat32;
  std::size_t data_offset = 0;
};

// NPY v1.0 (little-endian, C order). Readers also accept v2.0/v3.0 headers;
// the writer always emits v1.0 with 64-byte header alignment.
Tensor load_tensor(const std::filesystem::path& path);
NpyHeader read_npy_header(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const Tensor& tensor);

Tensor parse_npy(std::span<const std::byte> bytes, std::string_view origin);
std::vector<std::byte> serialize_npy(const Tensor& tensor);

}  // namespace mtuq

#endif  // MTUQ_TENSOR_HPP_
