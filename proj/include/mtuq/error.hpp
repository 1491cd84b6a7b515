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

#ifndef MTUQ_ERROR_HPP_
#define MTUQ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtuq {

enum class ErrorCode {
  kIo,                // file missing / unreadable / unwritable
  kFormat,            // malformed NPY or manifest document
  kUnsupportedDtype,  // NPY dtype outside {f4, i4, u1}
  kValidation,        // shape / rank / cross-entry consistency
  kInvalidInput,      // NaN, negative variance, broken probability simplex
  kInvalidLabel,      // label outside [0, C) and not the ignore index
  kInvalidParameter,  // bins == 0, window == 0, malformed threshold ...
  kEmptyStack,        // zero prediction samples
  kUndefinedMetric,   // metric has an empty denominator
  kInfiniteLoss,      // cross entropy with prob[gt] == 0
  kUnstableThreshold, // robust threshold with negative f, not forced
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception. The code is
// stable and is what the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mtuq

#endif  // MTUQ_ERROR_HPP_
