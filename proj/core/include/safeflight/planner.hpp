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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "safeflight/cone_program.hpp"
#include "safeflight/flatness.hpp"
#include "safeflight/spline.hpp"
#include "safeflight/tracker.hpp"

namespace safeflight {

// Intersection of cones ||A r + b|| <= c'r + d in R^3. A cone with an empty A
// is a halfspace.
class ConvexSet {
 public:
  struct Cone {
    Eigen::MatrixXd a;  // k x 3, k may be 0
    Eigen::VectorXd b;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    double d = 0.0;
  };

  ConvexSet() = default;
  ConvexSet(std::string name, std::vector<Cone> cones);

  // lo <= r <= hi componentwise.
  static ConvexSet box(std::string name, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);
  // A r <= b.
  static ConvexSet halfspaces(std::string name, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
  // ||A r + b|| <= 1.
  static ConvexSet ellipsoid(std::string name, const Eigen::Matrix3d& a, const Eigen::Vector3d& b);
  static ConvexSet ball(std::string name, const Eigen::Vector3d& center, double radius);

  const std::string& name() const { return name_; }
  const std::vector<Cone>& cones() const { return cones_; }

  // min over cones of (c'r + d) - ||A r + b||; nonnegative inside.
  double margin(const Eigen::Vector3d& r) const;

 private:
  std::string name_;
  std::vector<Cone> cones_;
};

struct SafetyBounds {
  std::optional<double> v_max;
  std::optional<double> eps;  // rad
  std::optional<double> thrust_min;
  std::optional<double> thrust_max;
  std::optional<double> omega_max;  // rad/s
  std::vector<ConvexSet> position_sets;
  // Extra tightening of the tilt cone right-hand side (m/s^2).
  double angle_cone_offset = 0.0;
};

struct Waypoint {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  double t = 0.0;
  double radius = 0.0;
};

// initial[r] / final[r] pin the r-th derivative at tau_0 / tau_v.
struct EndpointPins {
  std::vector<Eigen::Vector3d> initial;
  std::vector<Eigen::Vector3d> final;
};

struct Corridor {
  std::vector<ConvexSet> sets;
};

struct IntervalConstraint {
  enum class Kind { kPositionInSet, kSpeedBound };
  double t1 = 0.0;
  double t2 = 0.0;
  Kind kind = Kind::kPositionInSet;
  ConvexSet set;
  double bound = 0.0;
};

enum class ZetaMode { kVector, kScalar };

const char* to_string(ZetaMode mode);
ZetaMode parse_zeta_mode(const std::string& text);

struct PlanningProblem {
  double t0 = 0.0;
  double tf = 1.0;
  int n = 10;
  int degree = 5;
  double gravity = kStandardGravity;
  SafetyBounds bounds;
  std::vector<Waypoint> waypoints;
  EndpointPins pins;
  std::vector<IntervalConstraint> intervals;
  std::optional<Corridor> corridor;
  ZetaMode zeta_mode = ZetaMode::kVector;
  // When set, thrust and tilt bounds are shrunk so a tracker with these
  // parameters stays within the original bounds.
  std::optional<CbfParams> tracking_margins;
  SolveOptions solver;
};

// Variable layout of the assembled program: control point i of axis a is
// variable a*(N+1)+i, followed by the zeta variables and the snap epigraph
// variables (one per span and axis).
struct PlanLayout {
  int points = 0;  // N + 1
  int zeta_first = 0;
  int zeta_count = 0;
  int epigraph_first = 0;
  int epigraph_count = 0;
  int point(int axis, int i) const { return axis * points + i; }
};

// Context shared by the constraint compilers.
class PlanContext {
 public:
  PlanContext(KnotVector knots, double gravity);

  const KnotVector& knots() const { return knots_; }
  int n() const { return knots_.last_index(); }
  int degree() const { return knots_.degree(); }
  double gravity() const { return gravity_; }
  const PlanLayout& layout() const { return layout_; }
  PlanLayout& layout() { return layout_; }
  const Eigen::MatrixXd& derivative_matrix(int r) const;

  // Per-axis linear forms of the r-th order VCP P_j^(r).
  std::array<SparseRow, 3> vcp(int r, int j) const;
  // Per-axis linear forms of s^(r)(t).
  std::array<SparseRow, 3> derivative_at(int r, double t) const;

 private:
  KnotVector knots_;
  double gravity_;
  std::vector<Eigen::MatrixXd> b_;
  PlanLayout layout_;
};

void compile_position(const PlanContext& ctx, const std::vector<ConvexSet>& sets, ConeProgram& cp);
void compile_velocity(const PlanContext& ctx, double v_max, ConeProgram& cp);
void compile_angle_cone(const PlanContext& ctx, double eps, double offset, ConeProgram& cp);
void compile_thrust(const PlanContext& ctx, std::optional<double> thrust_min,
                    std::optional<double> thrust_max, ConeProgram& cp);
// Adds the zeta variables (objective coefficient -1) and their constraints.
void compile_angular_velocity(PlanContext& ctx, double omega_max, ZetaMode mode, ConeProgram& cp);
void compile_waypoints(const PlanContext& ctx, const std::vector<Waypoint>& waypoints, ConeProgram& cp);
void compile_endpoints(const PlanContext& ctx, const EndpointPins& pins, ConeProgram& cp);
void compile_corridor(const PlanContext& ctx, const Corridor& corridor, ConeProgram& cp);

// Spans first_span..last_span cover the window; index ranges are the control
// points (order 0) or VCPs (order 1) the emitted constraints touch.
struct IntervalCompilation {
  int first_span = 0;
  int last_span = 0;
  int first_index = 0;
  int last_index = 0;
};

IntervalCompilation compile_interval(const PlanContext& ctx, const IntervalConstraint& ic,
                                     ConeProgram& cp);

// Shrinks thrust_max by 4 sqrt(3) delta a2 and raises the tilt cone offset by
// 4 delta a2 (1 + sqrt(2) |cot eps|). Throws kInfeasibleMargins when the
// shrunk bounds leave no hover headroom.
SafetyBounds compile_tracking_margins(const SafetyBounds& bounds, const CbfParams& cbf,
                                      double gravity = kStandardGravity);

struct AssembledProgram {
  ConeProgram program;
  PlanContext context;
  SafetyBounds effective_bounds;
  std::vector<IntervalCompilation> intervals;
};

AssembledProgram assemble_program(const PlanningProblem& problem);

struct PlanStats {
  double objective = 0.0;
  double snap = 0.0;  // integrated squared snap of the solved curve
  int iterations = 0;
  double max_residual = 0.0;
  double solve_seconds = 0.0;
};

struct TrajectoryPlan {
  SplineCurve curve;
  Eigen::VectorXd zeta;
  ZetaMode zeta_mode = ZetaMode::kVector;
  PlanStats stats;
};

// Throws Error(kInfeasible) naming the constraint blocks present, or
// Error(kSolverFailure) when the solver does not converge.
TrajectoryPlan plan(const PlanningProblem& problem);

// Integrated squared snap of a curve, from the Gram form.
double snap_energy(const SplineCurve& curve);

}  // namespace safeflight
