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

#include "safeflight/error.hpp"

namespace safeflight {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kSingularThrust: return "singular-thrust";
    case ErrorCode::kSingularAttitude: return "singular-attitude";
    case ErrorCode::kInvertedFlight: return "inverted-flight";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kInfeasibleMargins: return "infeasible-margins";
    case ErrorCode::kSolverFailure: return "solver";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace safeflight
