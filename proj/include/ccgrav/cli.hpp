// Copyright 2026 The ccgrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

#include "json.hpp"

namespace ccgrav {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      ///< any other library error (e.g. invalid density matrix)
  kExitSchema = 2,       ///< bad flags, bad config file, invalid parameter values
  kExitConvergence = 3,  ///< quadrature, lattice sum or time stepping did not converge
};

enum class ParamType { kInt, kDouble, kString, kDoubleList };

struct ParamSpec {
  std::string name;  ///< JSON key; the flag is "--" + name with '_' replaced by '-'
  ParamType type;
  nlohmann::json default_value;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

/// Schemas of all commands, in display order.
const std::vector<CommandSpec>& command_specs();

/// FNV-1a 64-bit hash of the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved_config);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Results go to `out` unless an output path is configured;
/// error records go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccgrav
