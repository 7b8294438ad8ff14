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
#include <numbers>

#include <gtest/gtest.h>

#include "safeflight/error.hpp"
#include "safeflight/planner.hpp"
#include "safeflight/scenario.hpp"
#include "safeflight/verify.hpp"

namespace safeflight {
namespace {

const std::string kScenarios = SAFEFLIGHT_SCENARIO_DIR;

PlanningProblem point_to_point(double v_max) {
  PlanningProblem p;
  p.t0 = 0.0;
  p.tf = 4.0;
  p.n = 12;
  p.degree = 5;
  p.bounds.v_max = v_max;
  p.pins.initial = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  p.pins.final = {Eigen::Vector3d(1.0, 0.5, 0.2), Eigen::Vector3d::Zero()};
  return p;
}

TEST(ConvexSet, MarginsOfPrimitiveSets) {
  const ConvexSet box = ConvexSet::box("b", {0, 0, 0}, {1, 2, 3});
  EXPECT_NEAR(box.margin({0.5, 1.0, 1.0}), 0.5, 1e-15);
  EXPECT_NEAR(box.margin({1.5, 1.0, 1.0}), -0.5, 1e-15);
  const ConvexSet ball = ConvexSet::ball("s", {1, 1, 1}, 2.0);
  EXPECT_NEAR(ball.margin({1, 1, 2}), 1.0, 1e-15);
  EXPECT_NEAR(ball.margin({1, 1, 4}), -1.0, 1e-15);
  const ConvexSet ell = ConvexSet::ellipsoid("e", Eigen::Vector3d(2, 1, 1).asDiagonal(), Eigen::Vector3d::Zero());
  EXPECT_GT(ell.margin({0.49, 0, 0}), 0.0);
  EXPECT_LT(ell.margin({0.51, 0, 0}), 0.0);
  EXPECT_THROW(ConvexSet::box("bad", {1, 0, 0}, {0, 1, 1}), Error);
}

TEST(Planner, HoverPlanHasNoSnap) {
  const Scenario s = load_scenario(kScenarios + "/hover.json");
  const TrajectoryPlan p = plan(s.problem);
  EXPECT_LT(p.stats.snap, 1e-8);
  EXPECT_LE(p.stats.max_residual, 1e-8);
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    EXPECT_LT((curve_eval(p.curve, 0, t) - Eigen::Vector3d(0, 0, 1)).norm(), 1e-6);
  }
  EXPECT_TRUE(verify_plan(p, s.problem).ok());
}

TEST(Planner, PinsAndSpeedBoundHold) {
  const PlanningProblem prob = point_to_point(0.6);
  const TrajectoryPlan p = plan(prob);
  EXPECT_LT((curve_eval(p.curve, 0, 4.0) - Eigen::Vector3d(1.0, 0.5, 0.2)).norm(), 1e-7);
  EXPECT_LT(curve_eval(p.curve, 1, 0.0).norm(), 1e-7);
  const ConstraintReport r = verify_plan(p, prob, 400);
  ASSERT_NE(r.find("speed"), nullptr);
  EXPECT_GE(r.find("speed")->margin, -1e-7);
  EXPECT_TRUE(r.ok());
}

TEST(Planner, TighterSpeedBoundCostsSnap) {
  const double loose = plan(point_to_point(2.0)).stats.snap;
  const double tight = plan(point_to_point(0.45)).stats.snap;
  EXPECT_GE(tight, loose - 1e-9);
}

TEST(Planner, UnreachablePinsAreInfeasible) {
  try {
    plan(point_to_point(0.05));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
    EXPECT_NE(std::string(e.what()).find("velocity"), std::string::npos);
  }
}

TEST(Planner, AssemblyIsDeterministic) {
  const Scenario s = load_scenario(kScenarios + "/example2_window.json");
  const TrajectoryPlan a = plan(s.problem);
  const TrajectoryPlan b = plan(s.problem);
  EXPECT_EQ(write_plan_document(a, s.name), write_plan_document(b, s.name));
}

TEST(Planner, IntervalWindowIndexRanges) {
  const Scenario s = load_scenario(kScenarios + "/example2_window.json");
  const AssembledProgram prog = assemble_program(s.problem);
  ASSERT_EQ(prog.intervals.size(), 2u);
  EXPECT_EQ(prog.intervals[0].first_span, 18);
  EXPECT_EQ(prog.intervals[0].last_span, 32);
  EXPECT_EQ(prog.intervals[0].first_index, 13);
  EXPECT_EQ(prog.intervals[0].last_index, 32);
  EXPECT_EQ(prog.intervals[1].first_index, 14);
  EXPECT_EQ(prog.intervals[1].last_index, 32);
}

TEST(Planner, CorridorNeedsMatchingControlPointCount) {
  PlanningProblem p = point_to_point(1.0);
  p.corridor = Corridor{{ConvexSet::box("a", {-1, -1, -1}, {2, 2, 2})}};
  try {
    assemble_program(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Planner, TrackingMarginsShrinkBounds) {
  SafetyBounds b;
  b.eps = std::numbers::pi / 3.0;
  b.thrust_max = 2.0 * kStandardGravity;
  const CbfParams cbf = make_cbf_params(0.1, 6.0, 8.0);
  const SafetyBounds m = compile_tracking_margins(b, cbf);
  EXPECT_NEAR(*m.thrust_max, 2.0 * kStandardGravity - 4.0 * std::sqrt(3.0) * 0.8, 1e-12);
  EXPECT_NEAR(m.angle_cone_offset, 3.2 * (1.0 + std::sqrt(2.0) / std::tan(*b.eps)), 1e-12);

  b.thrust_max = kStandardGravity + 1.0;
  try {
    compile_tracking_margins(b, cbf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleMargins);
  }
}

TEST(Planner, ZetaModesBothCertifySpanBounds) {
  Scenario s = load_scenario(kScenarios + "/example2_window.json");
  s.problem.zeta_mode = ZetaMode::kVector;
  const TrajectoryPlan vec = plan(s.problem);
  s.problem.zeta_mode = ZetaMode::kScalar;
  const TrajectoryPlan sca = plan(s.problem);
  ASSERT_EQ(sca.zeta.size(), 1);
  EXPECT_GT(vec.zeta.size(), 1);
  EXPECT_GT(sca.zeta[0], 0.0);
  EXPECT_TRUE(verify_span_minima(vec, *s.problem.bounds.omega_max).ok());
  EXPECT_TRUE(verify_span_minima(sca, *s.problem.bounds.omega_max).ok());
}

TEST(Planner, SnapEnergyMatchesObjectiveTerm) {
  const PlanningProblem prob = point_to_point(1.0);
  const TrajectoryPlan p = plan(prob);
  // Without zeta variables the objective is the snap energy itself.
  EXPECT_NEAR(p.stats.objective, p.stats.snap, 1e-6 * (1.0 + p.stats.snap));
}

}  // namespace
}  // namespace safeflight
