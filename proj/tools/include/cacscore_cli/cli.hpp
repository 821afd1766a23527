// Copyright 2026 The cacscore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Entry point of the cacscore command-line tool, exposed as a library so the
// verbs can be driven in-process.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cacscore::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitProviderError = 3,
  kExitInvariantViolation = 4,
};

/// `args` excludes the program name. Reports go to `out`; structured error
/// records (one JSON object per line) go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cacscore::cli
