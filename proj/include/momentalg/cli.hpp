// Copyright 2026 The momentalg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace momentalg {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerificationFailure = 1,
  kExitInputError = 2,
  kExitDomainError = 3,
};

/// Environment variable that overrides the default comparison tolerance.
inline constexpr const char* kToleranceVariable = "MOMENTALG_TOLERANCE";

/// Parses "a..b" or a single integer into the inclusive seed list.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// Runs the command line; `in` serves "-" inputs. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace momentalg
