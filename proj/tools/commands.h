//
// Copyright 2026 The ksubset-ldp Authors
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
//

#ifndef KSUBSET_TOOLS_COMMANDS_H_
#define KSUBSET_TOOLS_COMMANDS_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace ksubset::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitVerifyFailed = 3,
};

// Full command-line entry point: `args` excludes the program name and `in`
// stands in for stdin wherever a path of "-" is accepted.
// Subcommands: analyze, randomize, estimate, simulate, table, verify.
int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace ksubset::cli

#endif  // KSUBSET_TOOLS_COMMANDS_H_
