// Copyright 2026 The macs Authors.
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

// Command-line front end.

#ifndef MACS_TOOLS_CLI_HPP_
#define MACS_TOOLS_CLI_HPP_

#include <ostream>

namespace macs {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNotCertified = 2,
  kExitInfeasible = 3,
};

// Parses argv, runs exactly one subcommand and returns its exit code.
// Human-readable summaries go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace macs

#endif  // MACS_TOOLS_CLI_HPP_
