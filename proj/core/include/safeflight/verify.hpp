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

#include <string>
#include <vector>

#include "safeflight/planner.hpp"

namespace safeflight {

inline constexpr int kDefaultSamplesPerSpan = 200;
inline constexpr double kPlanCheckTolerance = 1e-6;

// Worst signed margin of one constraint class; negative means violated.
struct MarginEntry {
  std::string name;
  double margin = 0.0;
  double time = 0.0;
  long samples = 0;
};

struct ConstraintReport {
  std::vector<MarginEntry> entries;

  const MarginEntry* find(const std::string& name) const;
  double worst_margin() const;
  bool ok(double tol = kPlanCheckTolerance) const { return worst_margin() >= -tol; }
};

// Samples the curve densely on every knot span, maps samples through the
// flatness maps and reports worst margins per constraint class. Each span's
// worst sample is refined by golden-section search, so margins do not depend
// on the sampling phase. Also re-checks the control-point certificates.
ConstraintReport verify_plan(const TrajectoryPlan& plan, const PlanningProblem& problem,
                             int samples_per_span = kDefaultSamplesPerSpan);

struct SpanMinimum {
  int span = 0;
  double zeta = 0.0;
  double min_thrust = 0.0;
  double max_jerk = 0.0;
};

struct SpanMinimaReport {
  std::vector<SpanMinimum> spans;
  double thrust_margin = 0.0;  // min over spans of min T - zeta
  double jerk_margin = 0.0;    // min over spans of omega_max zeta - max ||r'''||
  bool ok(double tol = kPlanCheckTolerance) const {
    return thrust_margin >= -tol && jerk_margin >= -tol;
  }
};

SpanMinimaReport verify_span_minima(const TrajectoryPlan& plan, double omega_max,
                                    double gravity = kStandardGravity,
                                    int samples_per_span = kDefaultSamplesPerSpan);

}  // namespace safeflight
