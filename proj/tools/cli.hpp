// Copyright 2026 The safeflight Authors
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

#include <ostream>
#include <string>
#include <vector>

namespace safeflight::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitInfeasible = 3,
  kExitVerification = 4,
  kExitRuntime = 5,
};

// Environment variable overriding the solver tolerance when --tol is absent.
inline constexpr const char* kSolverTolEnv = "SAFEFLIGHT_SOLVER_TOL";

// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace safeflight::cli
