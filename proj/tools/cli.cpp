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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "safeflight/error.hpp"
#include "safeflight/export.hpp"
#include "safeflight/scenario.hpp"

namespace safeflight::cli {
namespace {

constexpr double kToDeg = 180.0 / std::numbers::pi;
// Closed-loop checks allow this much sampled-data slack.
constexpr double kClosedLoopSlack = 0.01;

struct Options {
  std::string scenario;
  std::string plan;
  std::string trace;
  std::string out;
  std::string report;
  std::string dump_program;
  std::string program;
  std::string zeta_mode;
  std::string format = "columnar";
  std::optional<double> tol;
  int samples_per_span = kDefaultSamplesPerSpan;
  bool no_filter = false;
};

struct Failure {
  int code;
  std::string reason;
};

Failure classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kDimensionMismatch:
      return {kExitParse, "parse"};
    case ErrorCode::kIo:
      return {kExitParse, "io"};
    case ErrorCode::kInfeasible:
    case ErrorCode::kInfeasibleMargins:
      return {kExitInfeasible, "infeasible"};
    case ErrorCode::kSolverFailure:
      return {kExitRuntime, "solver"};
    case ErrorCode::kInvertedFlight:
      return {kExitRuntime, "inverted-flight"};
    case ErrorCode::kSingularThrust:
    case ErrorCode::kSingularAttitude:
      return {kExitRuntime, "singular"};
  }
  return {kExitRuntime, "runtime"};
}

Scenario load_with_overrides(const Options& o) {
  Scenario sc = load_scenario(o.scenario);
  std::optional<double> tol = o.tol;
  if (!tol) {
    if (const char* env = std::getenv(kSolverTolEnv); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end == env || *end != '\0' || !(v > 0.0)) {
        throw Error(ErrorCode::kParse, std::string(kSolverTolEnv) + ": not a positive number");
      }
      tol = v;
    }
  }
  if (tol) sc.problem.solver.feasibility_tol = sc.problem.solver.objective_tol = *tol;
  if (!o.zeta_mode.empty()) sc.problem.zeta_mode = parse_zeta_mode(o.zeta_mode);
  return sc;
}

int cmd_plan(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario sc = load_with_overrides(o);
  if (!o.dump_program.empty()) {
    std::ofstream f(o.dump_program);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + o.dump_program);
    write_program_text(assemble_program(sc.problem).program, f);
  }
  const TrajectoryPlan p = plan(sc.problem);
  const std::string doc = write_plan_document(p, sc.name);
  if (o.out.empty()) {
    out << doc;
  } else {
    write_text_file(o.out, doc);
  }
  // The summary carries wall-clock time, so it stays off the document stream.
  err << std::setprecision(10) << "plan " << sc.name << " objective " << p.stats.objective << " snap "
      << p.stats.snap << " iterations " << p.stats.iterations << " residual " << p.stats.max_residual
      << " solve_time_s " << p.stats.solve_seconds << "\n";
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Scenario sc = load_with_overrides(o);
  const TrajectoryPlan p = load_plan(o.plan);
  const ConstraintReport rep = verify_plan(p, sc.problem, o.samples_per_span);
  SpanMinimaReport spans;
  const bool has_zeta = sc.problem.bounds.omega_max && p.zeta.size() > 0;
  if (has_zeta) spans = verify_span_minima(p, *sc.problem.bounds.omega_max, sc.problem.gravity, o.samples_per_span);
  if (!o.report.empty()) write_text_file(o.report, write_report_document(rep, spans));

  std::vector<std::string> violated;
  out << std::setprecision(6);
  for (const auto& e : rep.entries) {
    const bool bad = e.margin < -kPlanCheckTolerance;
    out << (bad ? "FAIL " : "ok   ") << std::left << std::setw(32) << e.name << std::right << " margin "
        << std::setw(13) << e.margin << " at t=" << e.time << " (" << e.samples << " samples)\n";
    if (bad) violated.push_back(e.name);
  }
  if (has_zeta) {
    out << (spans.thrust_margin < -kPlanCheckTolerance ? "FAIL " : "ok   ") << std::left << std::setw(32)
        << "span-thrust-vs-zeta" << std::right << " margin " << std::setw(13) << spans.thrust_margin << "\n";
    out << (spans.jerk_margin < -kPlanCheckTolerance ? "FAIL " : "ok   ") << std::left << std::setw(32)
        << "span-jerk-vs-zeta" << std::right << " margin " << std::setw(13) << spans.jerk_margin << "\n";
    if (spans.thrust_margin < -kPlanCheckTolerance) violated.push_back("span-thrust-vs-zeta");
    if (spans.jerk_margin < -kPlanCheckTolerance) violated.push_back("span-jerk-vs-zeta");
  }
  if (violated.empty()) {
    out << "verify ok worst margin " << rep.worst_margin() << "\n";
    return kExitOk;
  }
  out << "verify failed:";
  for (const auto& v : violated) out << ' ' << v;
  out << "\n";
  return kExitVerification;
}

int cmd_track(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario sc = load_with_overrides(o);
  const TrajectoryPlan p = load_plan(o.plan);
  const Gravity g(sc.problem.gravity);
  const ReferenceSampler ref = curve_reference(p.curve);
  SimConfig cfg = sc.sim;
  const bool filtered = !o.no_filter;
  if (filtered) {
    const ReferencePoint r0 = ref(cfg.start_time);
    const TrackState z0 = cfg.initial_state.value_or(TrackState{r0.r, r0.r1});
    const InitialConditionReport ic = check_initial_conditions(z0, r0, sc.cbf);
    if (!ic.ok()) {
      err << "error: reason=initial-conditions position_error " << ic.position_error << " velocity_error "
          << ic.velocity_error << " tube " << ic.tube << " barrier_rate " << ic.barrier_rate << "\n";
      return kExitRuntime;
    }
  }
  TraceDocument doc;
  doc.scenario = sc.name;
  doc.filtered = filtered;
  doc.trace = simulate(ref, tracking_controller(sc.cbf, sc.nominal, filtered, g), cfg);
  doc.certificates = certificates(doc.trace, sc.cbf);
  if (!o.out.empty()) write_text_file(o.out, write_trace_document(doc));

  const CertificateReport& c = doc.certificates;
  out << std::setprecision(6) << "track " << sc.name << (filtered ? " filtered" : " unfiltered") << " ticks "
      << doc.trace.records.size() << "\n"
      << "  max position error " << c.max_position_error << " bound " << c.delta + kClosedLoopSlack << "\n"
      << "  max velocity error " << c.max_velocity_error << " bound " << c.velocity_bound + kClosedLoopSlack
      << "\n"
      << "  max input deviation " << c.max_input_deviation << " bound " << c.input_bound << "\n"
      << "  min barrier " << c.min_barrier << "\n";
  bool ok = c.holds(kClosedLoopSlack);

  // With tracking margins the realized inputs must respect the original bounds.
  if (sc.problem.tracking_margins) {
    const SafetyBounds& b = sc.problem.bounds;
    int violations = 0;
    double worst_thrust = 0.0, worst_angle = 0.0;
    for (const auto& r : doc.trace.records) {
      const ReducedInput& v = r.command.input;
      worst_thrust = std::max(worst_thrust, v.thrust);
      worst_angle = std::max({worst_angle, std::abs(v.phi), std::abs(v.theta)});
      if (b.thrust_max && v.thrust > *b.thrust_max) ++violations;
      if (b.eps && std::max(std::abs(v.phi), std::abs(v.theta)) > *b.eps) ++violations;
    }
    out << "  max thrust " << worst_thrust << " max angle_deg " << worst_angle * kToDeg << " input violations "
        << violations << "\n";
    ok = ok && violations == 0;
  }
  out << (ok ? "track ok\n" : "track certificates violated\n");
  return ok ? kExitOk : kExitVerification;
}

int cmd_export(const Options& o, std::ostream& out) {
  if (o.plan.empty() == o.trace.empty()) throw Error(ErrorCode::kParse, "export needs exactly one of --plan or --trace");
  std::ostringstream buf;
  if (!o.plan.empty()) {
    const TrajectoryPlan p = load_plan(o.plan);
    if (o.format == "document") {
      buf << write_plan_document(p, std::filesystem::path(o.plan).stem().string());
    } else {
      export_plan_columns(p, o.samples_per_span, buf);
    }
  } else {
    const TraceDocument t = load_trace(o.trace);
    if (o.format == "document") {
      buf << write_trace_document(t);
    } else {
      export_trace_columns(t.trace, buf);
    }
  }
  if (o.out.empty()) {
    out << buf.str();
  } else {
    write_text_file(o.out, buf.str());
  }
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  std::ifstream in(o.program);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + o.program);
  const ConeProgram cp = read_program_text(in);
  SolveOptions opts;
  std::optional<double> tol = o.tol;
  if (const char* env = std::getenv(kSolverTolEnv); !tol && env != nullptr && *env != '\0') tol = std::atof(env);
  if (tol) opts.feasibility_tol = opts.objective_tol = *tol;
  const Solution sol = solve(cp, opts);
  out << std::setprecision(17) << "status " << to_string(sol.status) << " objective " << sol.objective
      << " residual " << sol.max_residual << " iterations " << sol.iterations << "\n";
  if (!o.out.empty() && sol.status == SolveStatus::kOptimal) {
    std::ostringstream xs;
    xs << std::setprecision(17);
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) xs << sol.x[i] << "\n";
    write_text_file(o.out, xs.str());
  }
  switch (sol.status) {
    case SolveStatus::kOptimal:
      return kExitOk;
    case SolveStatus::kInfeasible:
    case SolveStatus::kUnbounded:
      return kExitInfeasible;
    case SolveStatus::kNumericalFailure:
      break;
  }
  return kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Safe quadrotor trajectory planning and tracking", "safeflight"};
  app.require_subcommand(1);
  Options o;

  auto* plan_cmd = app.add_subcommand("plan", "Solve a scenario and write the plan document");
  plan_cmd->add_option("--scenario", o.scenario, "Scenario file")->required();
  plan_cmd->add_option("--out", o.out, "Plan document (stdout when omitted)");
  plan_cmd->add_option("--zeta-mode", o.zeta_mode, "vector or scalar")->check(CLI::IsMember({"vector", "scalar"}));
  plan_cmd->add_option("--tol", o.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  plan_cmd->add_option("--dump-program", o.dump_program, "Write the assembled cone program as text");

  auto* track_cmd = app.add_subcommand("track", "Simulate closed-loop tracking of a plan");
  track_cmd->add_option("--plan", o.plan, "Plan document")->required();
  track_cmd->add_option("--scenario", o.scenario, "Scenario file")->required();
  track_cmd->add_option("--out", o.out, "Trace document");
  track_cmd->add_flag("--no-filter", o.no_filter, "Run the nominal controller without the safety filter");

  auto* verify_cmd = app.add_subcommand("verify", "Check a plan against its scenario constraints");
  verify_cmd->add_option("--plan", o.plan, "Plan document")->required();
  verify_cmd->add_option("--scenario", o.scenario, "Scenario file")->required();
  verify_cmd->add_option("--samples-per-span", o.samples_per_span, "Samples per knot span")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--report", o.report, "Write the margin report document");

  auto* export_cmd = app.add_subcommand("export", "Export a plan or trace");
  export_cmd->add_option("--plan", o.plan, "Plan document");
  export_cmd->add_option("--trace", o.trace, "Trace document");
  export_cmd->add_option("--format", o.format, "columnar or document")
      ->check(CLI::IsMember({"columnar", "document"}));
  export_cmd->add_option("--samples-per-span", o.samples_per_span, "Samples per knot span for plans")
      ->check(CLI::PositiveNumber);
  export_cmd->add_option("--out", o.out, "Output file (stdout when omitted)");

  auto* solve_cmd = app.add_subcommand("solve", "Solve a cone program dumped with plan --dump-program");
  solve_cmd->add_option("--program", o.program, "Program text")->required();
  solve_cmd->add_option("--tol", o.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", o.out, "Write the solution vector, one value per line");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: reason=parse " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (app.got_subcommand(plan_cmd)) return cmd_plan(o, out, err);
    if (app.got_subcommand(track_cmd)) return cmd_track(o, out, err);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(o, out);
    if (app.got_subcommand(solve_cmd)) return cmd_solve(o, out);
    return cmd_export(o, out);
  } catch (const Error& e) {
    const Failure f = classify(e.code());
    err << "error: reason=" << f.reason << " " << e.what() << "\n";
    return f.code;
  }
}

}  // namespace safeflight::cli
