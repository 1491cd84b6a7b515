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

// In-process entry point for the mtuq command line.

#ifndef MTUQ_TOOLS_CLI_HPP_
#define MTUQ_TOOLS_CLI_HPP_

#include <ostream>

namespace mtuq::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitIo = 3,
  kExitUndefined = 4,
};

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Diagnostics go to `err`, one line each, prefixed "error: ".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtuq::cli

#endif  // MTUQ_TOOLS_CLI_HPP_
