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

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>

#include "mtuq/error.hpp"
#include "mtuq/tensor.hpp"

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read and written as little-endian");

namespace mtuq {
namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicSize = 6;
constexpr std::size_t kAlign = 64;

std::size_t item_size(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return 4;
    case DType::kInt32: return 4;
    case DType::kUInt8: return 1;
  }
  return 0;
}

std::string_view descr_of(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return "<f4";
    case DType::kInt32: return "<i4";
    case DType::kUInt8: return "|u1";
  }
  return "";
}

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

[[noreturn]] void format_error(std::string_view origin, std::string_view what) {
  throw Error(ErrorCode::kFormat,
              std::string(origin) + ": malformed NPY: " + std::string(what));
}

// Minimal reader for the Python-literal dict that NPY headers carry.
class HeaderDict {
 public:
  HeaderDict(std::string_view text, std::string_view origin)
      : text_(text), origin_(origin) {}

  NpyHeader parse() {
    std::optional<std::string> descr;
    std::optional<bool> fortran;
    std::optional<std::vector<std::size_t>> shape;

    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      const std::string key = quoted();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        descr = quoted();
      } else if (key == "fortran_order") {
        fortran = boolean();
      } else if (key == "shape") {
        shape = tuple();
      } else {
        format_error(origin_, "unknown header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') format_error(origin_, "expected ',' or '}'");
    }
    if (!descr || !fortran || !shape) {
      format_error(origin_, "header lacks descr, fortran_order or shape");
    }
    if (*fortran) format_error(origin_, "fortran_order=True is not supported");

    NpyHeader header;
    header.shape = std::move(*shape);
    header.dtype = dtype_from(*descr);
    return header;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    if (peek() != c) format_error(origin_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string quoted() {
    const char q = peek();
    if (q != '\'' && q != '"') format_error(origin_, "expected quoted string");
    const std::size_t end = text_.find(q, pos_ + 1);
    if (end == std::string_view::npos) format_error(origin_, "unterminated string");
    std::string out(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }

  bool boolean() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    format_error(origin_, "expected True or False");
  }

  std::vector<std::size_t> tuple() {
    std::vector<std::size_t> dims;
    expect('(');
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        format_error(origin_, "expected a non-negative dimension");
      }
      std::size_t value = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        value = value * 10 + static_cast<std::size_t>(peek() - '0');
        ++pos_;
      }
      dims.push_back(value);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ')') {
        format_error(origin_, "expected ',' or ')' in shape");
      }
    }
  }

  DType dtype_from(const std::string& descr) const {
    if (descr == "<f4") return DType::kFloat32;
    if (descr == "<i4") return DType::kInt32;
    if (descr == "|u1" || descr == "<u1") return DType::kUInt8;
    throw Error(ErrorCode::kUnsupportedDtype,
                std::string(origin_) + ": unsupported NPY dtype '" + descr +
                    "' (supported: <f4, <i4, |u1)");
  }

  std::string_view text_;
  std::string_view origin_;
  std::size_t pos_ = 0;
};

// Parses magic, version and header dict from the leading bytes.
NpyHeader parse_header(std::span<const std::byte> bytes,
                       std::string_view origin) {
  if (bytes.size() < kMagicSize + 4 ||
      std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    format_error(origin, "missing \\x93NUMPY magic");
  }
  const auto major = static_cast<unsigned>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<std::size_t>(bytes[8]) |
                 (static_cast<std::size_t>(bytes[9]) << 8);
    prefix = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) format_error(origin, "truncated header length");
    header_len = 0;
    for (int i = 0; i < 4; ++i) {
      header_len |= static_cast<std::size_t>(bytes[8 + i]) << (8 * i);
    }
    prefix = 12;
  } else {
    format_error(origin, "unsupported format version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) format_error(origin, "truncated header");

  const std::string_view text(reinterpret_cast<const char*>(bytes.data()) + prefix,
                              header_len);
  NpyHeader header = HeaderDict(text, origin).parse();
  header.data_offset = prefix + header_len;
  return header;
}

std::vector<std::byte> read_file(const std::filesystem::path& path,
                                 std::optional<std::size_t> limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, path.string() + ": cannot open for reading");
  }
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  const std::size_t n = limit ? std::min(*limit, file_size) : file_size;
  std::vector<std::byte> bytes(n);
  if (n > 0 && !in.read(reinterpret_cast<char*>(bytes.data()),
                        static_cast<std::streamsize>(n))) {
    throw Error(ErrorCode::kIo, path.string() + ": read failed");
  }
  return bytes;
}

template <typename T>
std::vector<T> copy_payload(std::span<const std::byte> payload, std::size_t n) {
  std::vector<T> out(n);
  if (n > 0) std::memcpy(out.data(), payload.data(), n * sizeof(T));
  return out;
}

}  // namespace

std::string_view dtype_name(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return "float32";
    case DType::kInt32: return "int32";
    case DType::kUInt8: return "uint8";
  }
  return "unknown";
}

Tensor::Tensor(std::vector<std::size_t> shape, Storage data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t stored =
      std::visit([](const auto& v) { return v.size(); }, data_);
  if (product(shape_) != stored) {
    throw Error(ErrorCode::kValidation,
                "tensor shape product " + std::to_string(product(shape_)) +
                    " does not match element count " + std::to_string(stored));
  }
}

std::size_t Tensor::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

DType Tensor::dtype() const {
  switch (data_.index()) {
    case 0: return DType::kFloat32;
    case 1: return DType::kInt32;
    default: return DType::kUInt8;
  }
}

template <typename T>
std::span<const T> Tensor::values() const {
  const auto* v = std::get_if<std::vector<T>>(&data_);
  if (v == nullptr) {
    throw Error(ErrorCode::kValidation,
                "tensor dtype is " + std::string(dtype_name(dtype())) +
                    ", requested a different element type");
  }
  return {v->data(), v->size()};
}

template std::span<const float> Tensor::values<float>() const;
template std::span<const std::int32_t> Tensor::values<std::int32_t>() const;
template std::span<const std::uint8_t> Tensor::values<std::uint8_t>() const;

void Tensor::require_rank(std::size_t expected, std::string_view role) const {
  if (rank() != expected) {
    throw Error(ErrorCode::kValidation,
                std::string(role) + ": expected rank " +
                    std::to_string(expected) + ", got rank " +
                    std::to_string(rank()));
  }
}

Tensor parse_npy(std::span<const std::byte> bytes, std::string_view origin) {
  const NpyHeader header = parse_header(bytes, origin);
  const std::size_t n = product(header.shape);
  const std::size_t payload_size = n * item_size(header.dtype);
  const std::size_t available = bytes.size() - header.data_offset;
  if (available < payload_size) {
    format_error(origin, "truncated payload (" + std::to_string(available) +
                             " of " + std::to_string(payload_size) + " bytes)");
  }
  if (available > payload_size) {
    format_error(origin, "trailing bytes after payload");
  }
  const auto payload = bytes.subspan(header.data_offset);
  switch (header.dtype) {
    case DType::kFloat32:
      return Tensor(header.shape, copy_payload<float>(payload, n));
    case DType::kInt32:
      return Tensor(header.shape, copy_payload<std::int32_t>(payload, n));
    case DType::kUInt8:
      return Tensor(header.shape, copy_payload<std::uint8_t>(payload, n));
  }
  format_error(origin, "unreachable dtype");
}

std::vector<std::byte> serialize_npy(const Tensor& tensor) {
  std::string dict = "{'descr': '";
  dict += descr_of(tensor.dtype());
  dict += "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < tensor.rank(); ++i) {
    if (i > 0) dict += ", ";
    dict += std::to_string(tensor.dim(i));
  }
  if (tensor.rank() == 1) dict += ",";
  dict += "), }";

  const std::size_t unpadded = kMagicSize + 4 + dict.size() + 1;
  const std::size_t padding = (kAlign - unpadded % kAlign) % kAlign;
  dict.append(padding, ' ');
  dict += '\n';
  if (dict.size() > 0xFFFF) {
    throw Error(ErrorCode::kValidation, "NPY v1.0 header too large");
  }

  const std::size_t payload_size = tensor.size() * item_size(tensor.dtype());
  std::vector<std::byte> out(kMagicSize + 4 + dict.size() + payload_size);
  std::memcpy(out.data(), kMagic, kMagicSize);
  out[6] = std::byte{1};
  out[7] = std::byte{0};
  out[8] = static_cast<std::byte>(dict.size() & 0xFF);
  out[9] = static_cast<std::byte>((dict.size() >> 8) & 0xFF);
  std::memcpy(out.data() + 10, dict.data(), dict.size());
  std::visit(
      [&](const auto& v) {
        if (!v.empty()) {
          std::memcpy(out.data() + 10 + dict.size(), v.data(),
                      v.size() * sizeof(v[0]));
        }
      },
      tensor.storage());
  return out;
}

Tensor load_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file(path, std::nullopt);
  return parse_npy(bytes, path.string());
}

NpyHeader read_npy_header(const std::filesystem::path& path) {
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::kIo, path.string() + ": cannot open for reading");
  // Header dicts are short; 64 KiB covers any v1.0 header.
  const auto bytes = read_file(path, std::size_t{65536 + 12});
  NpyHeader header = parse_header(bytes, path.string());
  const std::size_t payload = product(header.shape) * item_size(header.dtype);
  if (file_size != header.data_offset + payload) {
    format_error(path.string(), "payload size does not match header shape");
  }
  return header;
}

void save_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  const auto bytes = serialize_npy(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, path.string() + ": write failed");
}

}  // namespace mtuq
