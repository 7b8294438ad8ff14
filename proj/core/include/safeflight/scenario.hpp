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

#include <filesystem>
#include <string>

#include "safeflight/planner.hpp"
#include "safeflight/simulation.hpp"
#include "safeflight/tracker.hpp"
#include "safeflight/verify.hpp"

namespace safeflight {

inline constexpr int kScenarioVersion = 1;

// Everything a pipeline run needs. Angles are radians here; scenario files
// carry degrees and are converted on ingestion.
struct Scenario {
  std::string name;
  PlanningProblem problem;
  CbfParams cbf;
  SimConfig sim;
  PdGains nominal;
};

// Parses and validates a scenario document. Throws Error(kParse) with the
// offending field path; unknown fields are rejected.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Self-describing plan document. Excludes wall-clock timing, so identical
// inputs give byte-identical documents; doubles round-trip exactly.
std::string write_plan_document(const TrajectoryPlan& plan, const std::string& scenario_name);
TrajectoryPlan parse_plan_document(const std::string& text, const std::string& source = "<plan>");
TrajectoryPlan load_plan(const std::filesystem::path& path);

struct TraceDocument {
  std::string scenario;
  bool filtered = true;
  SimTrace trace;
  CertificateReport certificates;
};

std::string write_trace_document(const TraceDocument& doc);
TraceDocument parse_trace_document(const std::string& text, const std::string& source = "<trace>");
TraceDocument load_trace(const std::filesystem::path& path);

std::string write_report_document(const ConstraintReport& report, const SpanMinimaReport& spans);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace safeflight
