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


#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "safeflight/error.hpp"
#include "safeflight/export.hpp"
#include "safeflight/scenario.hpp"

namespace safeflight {
namespace {

const std::string kScenarios = SAFEFLIGHT_SCENARIO_DIR;

const char* kMinimal = R"({
  "version": 1,
  "name": "mini",
  "knots": {"t0": 0, "tf": 2, "n": 8, "degree": 5},
  "bounds": {"v_max": 1.0, "eps_deg": 30, "omega_max_deg_s": 90},
  "pins": {"initial": [[0, 0, 1]], "final": [[0.5, 0, 1]]}
})";

ErrorCode parse_code(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

TEST(Scenario, MinimalDocumentFillsDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "mini");
  EXPECT_NEAR(*s.problem.bounds.eps, std::numbers::pi / 6.0, 1e-15);
  EXPECT_NEAR(*s.problem.bounds.omega_max, std::numbers::pi / 2.0, 1e-15);
  EXPECT_FALSE(s.problem.bounds.thrust_max.has_value());
  EXPECT_DOUBLE_EQ(s.sim.duration, 2.0);
  EXPECT_DOUBLE_EQ(s.cbf.delta, 0.1);
}

TEST(Scenario, RejectsUnknownAndMalformedFields) {
  std::string extra = kMinimal;
  extra.insert(extra.find("\"name\""), "\"colour\": 3, ");
  EXPECT_EQ(parse_code(extra), ErrorCode::kParse);
  std::string version = kMinimal;
  version.replace(version.find("\"version\": 1"), 12, "\"version\": 7");
  EXPECT_EQ(parse_code(version), ErrorCode::kParse);
  EXPECT_EQ(parse_code("{not json"), ErrorCode::kParse);
  try {
    parse_scenario(R"({"version": 1, "name": "x", "knots": {"t0": 0, "tf": "soon", "n": 8, "degree": 5}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("knots.tf"), std::string::npos);
  }
}

TEST(Scenario, BundledScenariosLoad) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load_scenario(entry.path());
    EXPECT_EQ(s.name, entry.path().stem().string());
    ++count;
  }
  EXPECT_GE(count, 10);
}

TEST(Scenario, CorridorRepeatsExpand) {
  const Scenario s = load_scenario(kScenarios + "/example3_c2_c3.json");
  ASSERT_TRUE(s.problem.corridor.has_value());
  EXPECT_EQ(static_cast<int>(s.problem.corridor->sets.size()) + s.problem.degree - 1, s.problem.n);
  EXPECT_EQ(s.problem.corridor->sets.front().name(), "C2");
  EXPECT_EQ(s.problem.corridor->sets.back().name(), "C3");
}

TEST(Scenario, PlanDocumentRoundTripsExactly) {
  const Scenario s = parse_scenario(kMinimal);
  const TrajectoryPlan p = plan(s.problem);
  const std::string text = write_plan_document(p, s.name);
  const TrajectoryPlan back = parse_plan_document(text);
  EXPECT_EQ(back.curve.control_points(), p.curve.control_points());
  EXPECT_EQ(back.zeta, p.zeta);
  EXPECT_EQ(back.curve.knots().values(), p.curve.knots().values());
  EXPECT_EQ(write_plan_document(back, s.name), text);
}

TEST(Scenario, TraceDocumentRoundTrips) {
  const Scenario s = parse_scenario(kMinimal);
  const TrajectoryPlan p = plan(s.problem);
  TraceDocument doc;
  doc.scenario = s.name;
  doc.trace = simulate(curve_reference(p.curve), tracking_controller(s.cbf, s.nominal, true), s.sim);
  doc.certificates = certificates(doc.trace, s.cbf);
  const std::string text = write_trace_document(doc);
  const TraceDocument back = parse_trace_document(text);
  ASSERT_EQ(back.trace.records.size(), doc.trace.records.size());
  EXPECT_EQ(back.trace.records.back().state.r, doc.trace.records.back().state.r);
  EXPECT_EQ(back.certificates.max_position_error, doc.certificates.max_position_error);
  EXPECT_EQ(write_trace_document(back), text);
}

TEST(Export, PlanColumnsHaveHeaderAndRows) {
  const Scenario s = parse_scenario(kMinimal);
  const TrajectoryPlan p = plan(s.problem);
  std::ostringstream out;
  export_plan_columns(p, 10, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("t,x,y,z,speed", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  const int spans = p.curve.knots().last_span() - p.curve.knots().first_span() + 1;
  EXPECT_EQ(rows, spans * 10 + 1);
}

TEST(Io, MissingFileIsAnIoError) {
  try {
    load_scenario("/nonexistent/nowhere.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace safeflight
