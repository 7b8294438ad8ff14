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

#include "safeflight/planner.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "safeflight/error.hpp"

namespace safeflight {
namespace {

using Eigen::Vector3d;

// Sum_k w[k] * rows[k]; rows of distinct axes never share variables.
SparseRow combine(const std::array<SparseRow, 3>& rows, const Vector3d& w) {
  SparseRow out;
  for (int k = 0; k < 3; ++k) {
    if (w[k] == 0.0) continue;
    for (const auto& [index, coef] : rows[static_cast<std::size_t>(k)]) {
      out.emplace_back(index, w[k] * coef);
    }
  }
  return out;
}

SparseRow scaled(const SparseRow& row, double s) {
  SparseRow out = row;
  for (auto& term : out) term.second *= s;
  return out;
}

// Emits point in set, where point is given by per-axis linear forms.
void add_membership(const std::array<SparseRow, 3>& point, const ConvexSet& set, ConeProgram& cp) {
  for (const auto& cone : set.cones()) {
    const SparseRow rhs = combine(point, cone.c);
    if (cone.a.rows() == 0) {
      cp.add_inequality(scaled(rhs, -1.0), cone.d);
      continue;
    }
    std::vector<AffineForm> lhs;
    for (Eigen::Index k = 0; k < cone.a.rows(); ++k) {
      lhs.push_back({combine(point, cone.a.row(k).transpose()), cone.b[k]});
    }
    cp.add_soc(std::move(lhs), {rhs, cone.d});
  }
}

std::vector<AffineForm> axis_forms(const std::array<SparseRow, 3>& rows, const Vector3d& offset) {
  std::vector<AffineForm> out;
  for (int k = 0; k < 3; ++k) out.push_back({rows[static_cast<std::size_t>(k)], offset[k]});
  return out;
}

double abs_cot(double eps) { return std::abs(1.0 / std::tan(eps)); }

}  // namespace

ConvexSet::ConvexSet(std::string name, std::vector<Cone> cones)
    : name_(std::move(name)), cones_(std::move(cones)) {
  for (const auto& c : cones_) {
    if (c.a.rows() > 0 && c.a.cols() != 3) {
      throw Error(ErrorCode::kDimensionMismatch, "set '" + name_ + "': cone matrix must have 3 columns");
    }
    if (c.a.rows() != c.b.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "set '" + name_ + "': cone offset size mismatch");
    }
  }
}

ConvexSet ConvexSet::halfspaces(std::string name, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.cols() != 3 || a.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "halfspace set '" + name + "' needs A (k x 3) and b (k)");
  }
  std::vector<Cone> cones;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    Cone c;
    c.a.resize(0, 3);
    c.c = -a.row(k).transpose();
    c.d = b[k];
    cones.push_back(std::move(c));
  }
  return ConvexSet(std::move(name), std::move(cones));
}

ConvexSet ConvexSet::box(std::string name, const Vector3d& lo, const Vector3d& hi) {
  if ((lo.array() > hi.array()).any()) {
    throw Error(ErrorCode::kInvalidArgument, "box '" + name + "' has lo > hi");
  }
  Eigen::MatrixXd a(6, 3);
  a << Eigen::Matrix3d::Identity(), -Eigen::Matrix3d::Identity();
  Eigen::VectorXd b(6);
  b << hi, -lo;
  return halfspaces(std::move(name), a, b);
}

ConvexSet ConvexSet::ellipsoid(std::string name, const Eigen::Matrix3d& a, const Vector3d& b) {
  Cone c;
  c.a = a;
  c.b = b;
  c.d = 1.0;
  return ConvexSet(std::move(name), {c});
}

ConvexSet ConvexSet::ball(std::string name, const Vector3d& center, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "ball '" + name + "' has negative radius");
  Cone c;
  c.a = Eigen::Matrix3d::Identity();
  c.b = -center;
  c.d = radius;
  return ConvexSet(std::move(name), {c});
}

double ConvexSet::margin(const Vector3d& r) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : cones_) {
    const double lhs = c.a.rows() == 0 ? 0.0 : (c.a * r + c.b).norm();
    m = std::min(m, c.c.dot(r) + c.d - lhs);
  }
  return m;
}

const char* to_string(ZetaMode mode) { return mode == ZetaMode::kVector ? "vector" : "scalar"; }

ZetaMode parse_zeta_mode(const std::string& text) {
  if (text == "vector") return ZetaMode::kVector;
  if (text == "scalar") return ZetaMode::kScalar;
  throw Error(ErrorCode::kParse, "zeta mode must be 'vector' or 'scalar', got '" + text + "'");
}

PlanContext::PlanContext(KnotVector knots, double gravity)
    : knots_(std::move(knots)), gravity_(gravity) {
  for (int r = 0; r <= knots_.degree(); ++r) {
    b_.push_back(build_derivative_matrix(knots_, r).matrix);
  }
  layout_.points = knots_.control_count();
}

const Eigen::MatrixXd& PlanContext::derivative_matrix(int r) const {
  if (r < 0 || r > degree()) {
    throw Error(ErrorCode::kOutOfRange, "derivative order " + std::to_string(r) + " exceeds degree");
  }
  return b_[static_cast<std::size_t>(r)];
}

std::array<SparseRow, 3> PlanContext::vcp(int r, int j) const {
  const Eigen::MatrixXd& b = derivative_matrix(r);
  std::array<SparseRow, 3> rows;
  for (int i = 0; i < b.rows(); ++i) {
    const double v = b(i, j);
    if (v == 0.0) continue;
    for (int axis = 0; axis < 3; ++axis) {
      rows[static_cast<std::size_t>(axis)].emplace_back(layout_.point(axis, i), v);
    }
  }
  return rows;
}

std::array<SparseRow, 3> PlanContext::derivative_at(int r, double t) const {
  const Eigen::VectorXd coeff = derivative_matrix(r) * basis_eval(knots_, degree() - r, t);
  std::array<SparseRow, 3> rows;
  for (int i = 0; i < coeff.size(); ++i) {
    if (coeff[i] == 0.0) continue;
    for (int axis = 0; axis < 3; ++axis) {
      rows[static_cast<std::size_t>(axis)].emplace_back(layout_.point(axis, i), coeff[i]);
    }
  }
  return rows;
}

void compile_position(const PlanContext& ctx, const std::vector<ConvexSet>& sets, ConeProgram& cp) {
  for (const auto& set : sets) {
    for (int j = 0; j <= ctx.n(); ++j) add_membership(ctx.vcp(0, j), set, cp);
  }
}

void compile_velocity(const PlanContext& ctx, double v_max, ConeProgram& cp) {
  if (!(v_max >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "speed bound must be nonnegative");
  for (int j = 1; j <= ctx.n(); ++j) {
    cp.add_soc(axis_forms(ctx.vcp(1, j), Vector3d::Zero()), {{}, v_max});
  }
}

void compile_angle_cone(const PlanContext& ctx, double eps, double offset, ConeProgram& cp) {
  if (!(eps > 0.0 && eps < std::numbers::pi / 2)) {
    throw Error(ErrorCode::kInvalidArgument, "tilt bound must lie in (0, pi/2)");
  }
  const double k = abs_cot(eps);
  for (int j = 2; j <= ctx.n(); ++j) {
    const auto a = ctx.vcp(2, j);
    std::vector<AffineForm> lhs = {{scaled(a[0], k), 0.0}, {scaled(a[1], k), 0.0}};
    cp.add_soc(std::move(lhs), {a[2], ctx.gravity() - offset});
  }
}

void compile_thrust(const PlanContext& ctx, std::optional<double> thrust_min,
                    std::optional<double> thrust_max, ConeProgram& cp) {
  const double g = ctx.gravity();
  if ((thrust_min && !(*thrust_min >= 0.0 && *thrust_min <= g)) ||
      (thrust_max && !(*thrust_max >= g))) {
    throw Error(ErrorCode::kInvalidArgument, "thrust band must satisfy 0 <= T_min <= g <= T_max");
  }
  for (int j = 2; j <= ctx.n(); ++j) {
    const auto a = ctx.vcp(2, j);
    if (thrust_max) cp.add_soc(axis_forms(a, Vector3d(0.0, 0.0, g)), {{}, *thrust_max});
    if (thrust_min) cp.add_inequality(scaled(a[2], -1.0), g - *thrust_min);
  }
}

void compile_angular_velocity(PlanContext& ctx, double omega_max, ZetaMode mode, ConeProgram& cp) {
  if (!(omega_max >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "rate bound must be nonnegative");
  const int n = ctx.n(), d = ctx.degree();
  const int count = mode == ZetaMode::kVector ? n - d + 1 : 1;
  PlanLayout& layout = ctx.layout();
  layout.zeta_first = cp.add_variables(count);
  layout.zeta_count = count;
  for (int k = 0; k < count; ++k) cp.add_objective(layout.zeta_first + k, -1.0);

  auto emit = [&](int zeta, int j2_first, int j3_first, int j_last) {
    for (int j = j2_first; j <= j_last; ++j) {
      SparseRow row = scaled(ctx.vcp(2, j)[2], -1.0);
      row.emplace_back(zeta, 1.0);
      cp.add_inequality(std::move(row), ctx.gravity());
    }
    for (int j = j3_first; j <= j_last; ++j) {
      cp.add_soc(axis_forms(ctx.vcp(3, j), Vector3d::Zero()), {{{zeta, omega_max}}, 0.0});
    }
  };
  if (mode == ZetaMode::kScalar) {
    emit(layout.zeta_first, 2, 3, n);
    return;
  }
  for (int l = d; l <= n; ++l) emit(layout.zeta_first + l - d, l - d + 2, l - d + 3, l);
}

void compile_waypoints(const PlanContext& ctx, const std::vector<Waypoint>& waypoints, ConeProgram& cp) {
  for (const auto& wp : waypoints) {
    if (!ctx.knots().contains(wp.t)) {
      throw Error(ErrorCode::kOutOfRange, "waypoint time " + std::to_string(wp.t) + " outside knot range");
    }
    if (!(wp.radius >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "waypoint radius must be nonnegative");
    const auto rows = ctx.derivative_at(0, wp.t);
    if (wp.radius == 0.0) {
      for (int k = 0; k < 3; ++k) cp.add_equality(rows[static_cast<std::size_t>(k)], wp.p[k]);
      continue;
    }
    cp.add_soc(axis_forms(rows, -wp.p), {{}, wp.radius});
  }
}

void compile_endpoints(const PlanContext& ctx, const EndpointPins& pins, ConeProgram& cp) {
  auto emit = [&](const std::vector<Vector3d>& values, double t) {
    if (static_cast<int>(values.size()) > ctx.degree() + 1) {
      throw Error(ErrorCode::kInvalidArgument, "pinned derivative order exceeds degree");
    }
    for (std::size_t r = 0; r < values.size(); ++r) {
      const auto rows = ctx.derivative_at(static_cast<int>(r), t);
      for (int k = 0; k < 3; ++k) cp.add_equality(rows[static_cast<std::size_t>(k)], values[r][k]);
    }
  };
  emit(pins.initial, ctx.knots().start());
  emit(pins.final, ctx.knots().end());
}

void compile_corridor(const PlanContext& ctx, const Corridor& corridor, ConeProgram& cp) {
  const int ns = static_cast<int>(corridor.sets.size());
  if (ns == 0 || ctx.n() != ns + ctx.degree() - 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "corridor of " + std::to_string(ns) + " sets needs N = " +
                    std::to_string(ns + ctx.degree() - 1) + ", got " + std::to_string(ctx.n()));
  }
  for (int l = 1; l <= ns; ++l) {
    for (int j = l; j <= l + ctx.degree(); ++j) {
      add_membership(ctx.vcp(0, j - 1), corridor.sets[static_cast<std::size_t>(l - 1)], cp);
    }
  }
}

IntervalCompilation compile_interval(const PlanContext& ctx, const IntervalConstraint& ic,
                                     ConeProgram& cp) {
  const KnotVector& knots = ctx.knots();
  if (!(ic.t1 < ic.t2)) throw Error(ErrorCode::kInvalidArgument, "interval window is empty");
  if (!knots.contains(ic.t1) || !knots.contains(ic.t2)) {
    throw Error(ErrorCode::kOutOfRange, "interval window outside knot range");
  }
  IntervalCompilation out;
  out.first_span = knots.span_index(ic.t1);
  out.last_span = knots.span_index(ic.t2);
  if (ic.t2 == knots[out.last_span] && out.last_span > out.first_span) --out.last_span;
  const int d = ctx.degree();
  if (ic.kind == IntervalConstraint::Kind::kPositionInSet) {
    out.first_index = out.first_span - d;
    out.last_index = out.last_span;
    for (int j = out.first_index; j <= out.last_index; ++j) add_membership(ctx.vcp(0, j), ic.set, cp);
  } else {
    if (!(ic.bound >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "interval speed bound must be nonnegative");
    out.first_index = out.first_span - d + 1;
    out.last_index = out.last_span;
    for (int j = out.first_index; j <= out.last_index; ++j) {
      cp.add_soc(axis_forms(ctx.vcp(1, j), Vector3d::Zero()), {{}, ic.bound});
    }
  }
  return out;
}

SafetyBounds compile_tracking_margins(const SafetyBounds& bounds, const CbfParams& cbf, double gravity) {
  SafetyBounds out = bounds;
  const double dev = 4.0 * cbf.delta * cbf.a2;
  if (out.thrust_max) {
    const double shrunk = *out.thrust_max - std::sqrt(3.0) * dev;
    if (shrunk < gravity) {
      std::ostringstream msg;
      msg << "thrust_max: tracking margin " << std::sqrt(3.0) * dev << " leaves " << shrunk
          << " < g = " << gravity;
      throw Error(ErrorCode::kInfeasibleMargins, msg.str());
    }
    out.thrust_max = shrunk;
  }
  if (out.eps) {
    out.angle_cone_offset += dev * (1.0 + std::sqrt(2.0) * abs_cot(*out.eps));
    if (out.angle_cone_offset >= gravity) {
      std::ostringstream msg;
      msg << "eps: tilt cone offset " << out.angle_cone_offset << " reaches g = " << gravity;
      throw Error(ErrorCode::kInfeasibleMargins, msg.str());
    }
  }
  return out;
}

AssembledProgram assemble_program(const PlanningProblem& problem) {
  if (problem.degree < 4) {
    throw Error(ErrorCode::kInvalidArgument, "snap objective needs degree >= 4");
  }
  Gravity g(problem.gravity);
  AssembledProgram out{ConeProgram(),
                       PlanContext(make_clamped_uniform_knots(problem.t0, problem.tf, problem.n, problem.degree),
                                   g.value()),
                       problem.bounds,
                       {}};
  if (problem.tracking_margins) {
    out.effective_bounds = compile_tracking_margins(problem.bounds, *problem.tracking_margins, g.value());
  }
  const SafetyBounds& b = out.effective_bounds;
  PlanContext& ctx = out.context;
  ConeProgram& cp = out.program;
  cp.add_variables(3 * ctx.layout().points);

  cp.set_block("endpoints");
  compile_endpoints(ctx, problem.pins, cp);
  cp.set_block("waypoints");
  compile_waypoints(ctx, problem.waypoints, cp);
  cp.set_block("position");
  compile_position(ctx, b.position_sets, cp);
  if (problem.corridor) {
    cp.set_block("corridor");
    compile_corridor(ctx, *problem.corridor, cp);
  }
  for (std::size_t k = 0; k < problem.intervals.size(); ++k) {
    cp.set_block("interval" + std::to_string(k));
    out.intervals.push_back(compile_interval(ctx, problem.intervals[k], cp));
  }
  if (b.v_max) {
    cp.set_block("velocity");
    compile_velocity(ctx, *b.v_max, cp);
  }
  if (b.eps) {
    cp.set_block("tilt");
    compile_angle_cone(ctx, *b.eps, b.angle_cone_offset, cp);
  }
  if (b.thrust_min || b.thrust_max) {
    cp.set_block("thrust");
    compile_thrust(ctx, b.thrust_min, b.thrust_max, cp);
  }
  if (b.omega_max) {
    cp.set_block("body-rate");
    compile_angular_velocity(ctx, *b.omega_max, problem.zeta_mode, cp);
  }

  cp.set_block("snap");
  // One small epigraph per span and axis keeps the cone blocks, and with
  // them the KKT factor, sparse.
  const SnapGram sg = snap_gram(ctx.knots());
  const int rows = sg.rows_per_span;
  PlanLayout& layout = ctx.layout();
  layout.epigraph_first = cp.variable_count();
  for (Eigen::Index first = 0; first < sg.factor.rows(); first += rows) {
    const Eigen::MatrixXd block = sg.factor.middleRows(first, rows);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      if (block.col(j).cwiseAbs().maxCoeff() > 0.0) cols.push_back(j);
    }
    Eigen::MatrixXd g(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) g.col(static_cast<Eigen::Index>(c)) = block.col(cols[c]);
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<int> selector;
      for (const auto j : cols) selector.push_back(layout.point(axis, static_cast<int>(j)));
      cp.add_objective(add_quadratic_epigraph(cp, g, selector), 1.0);
      ++layout.epigraph_count;
    }
  }
  return out;
}

double snap_energy(const SplineCurve& curve) {
  const Eigen::MatrixXd q = snap_gram(curve.knots()).gram;
  double total = 0.0;
  for (int axis = 0; axis < curve.dimension(); ++axis) {
    const Eigen::VectorXd x = curve.control_points().row(axis).transpose();
    total += x.dot(q * x);
  }
  return total;
}

TrajectoryPlan plan(const PlanningProblem& problem) {
  const AssembledProgram asm_ = assemble_program(problem);
  const auto start = std::chrono::steady_clock::now();
  const Solution sol = solve(asm_.program, problem.solver);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (sol.status != SolveStatus::kOptimal) {
    std::ostringstream msg;
    msg << "plan " << to_string(sol.status) << " after " << sol.iterations << " iterations; blocks:";
    for (const auto& c : asm_.program.block_counts()) {
      msg << ' ' << c.block << "(soc " << c.soc << ", eq " << c.equalities << ", ineq "
          << c.inequalities << ')';
    }
    const ErrorCode code = sol.status == SolveStatus::kInfeasible ? ErrorCode::kInfeasible
                                                                 : ErrorCode::kSolverFailure;
    throw Error(code, msg.str());
  }

  const PlanLayout& layout = asm_.context.layout();
  Eigen::MatrixXd points(3, layout.points);
  for (int axis = 0; axis < 3; ++axis) {
    points.row(axis) = sol.x.segment(layout.point(axis, 0), layout.points).transpose();
  }
  TrajectoryPlan out{SplineCurve(asm_.context.knots(), points),
                     sol.x.segment(layout.zeta_first, layout.zeta_count),
                     problem.zeta_mode,
                     {}};
  out.stats.objective = sol.objective;
  out.stats.snap = snap_energy(out.curve);
  out.stats.iterations = sol.iterations;
  out.stats.max_residual = sol.max_residual;
  out.stats.solve_seconds = seconds;
  return out;
}

}  // namespace safeflight
