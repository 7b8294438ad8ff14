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

#include "safeflight/planner.hpp"
#include "safeflight/simulation.hpp"

namespace safeflight {

// Columnar text with a single header line. A plan is sampled uniformly per
// span (the final knot included); a trace writes one row per control tick.
// Angles and rates are in degrees.
void export_plan_columns(const TrajectoryPlan& plan, int samples_per_span, std::ostream& out,
                         Gravity g = Gravity());
void export_trace_columns(const SimTrace& trace, std::ostream& out);

}  // namespace safeflight
