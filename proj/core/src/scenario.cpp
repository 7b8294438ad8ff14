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

#include "safeflight/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "safeflight/error.hpp"

namespace safeflight {
namespace {

using json = nlohmann::ordered_json;
using Eigen::Vector3d;

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParse, where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail(where, "unknown field '" + item.key() + "'");
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "expected a finite number");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

std::optional<double> opt_number(const json& obj, const char* key, const std::string& where, double scale = 1.0) {
  if (!obj.contains(key)) return std::nullopt;
  return scale * number(obj.at(key), where + "." + key);
}

Eigen::VectorXd vector(const json& v, const std::string& where, int size = -1) {
  if (!v.is_array()) fail(where, "expected an array");
  if (size >= 0 && static_cast<int>(v.size()) != size) {
    fail(where, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Vector3d vec3(const json& v, const std::string& where) { return vector(v, where, 3); }

Eigen::MatrixXd matrix(const json& v, const std::string& where, int cols) {
  if (!v.is_array()) fail(where, "expected an array of rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = vector(v[i], where + "[" + std::to_string(i) + "]", cols).transpose();
  }
  return out;
}

ConvexSet parse_set(const std::string& name, const json& v, const std::string& where) {
  const std::string type = field(v, "type", where).get<std::string>();
  if (type == "box") {
    check_keys(v, where, {"type", "lo", "hi"});
    return ConvexSet::box(name, vec3(field(v, "lo", where), where + ".lo"), vec3(field(v, "hi", where), where + ".hi"));
  }
  if (type == "halfspaces") {
    check_keys(v, where, {"type", "A", "b"});
    const Eigen::MatrixXd a = matrix(field(v, "A", where), where + ".A", 3);
    return ConvexSet::halfspaces(name, a, vector(field(v, "b", where), where + ".b", static_cast<int>(a.rows())));
  }
  if (type == "ellipsoid") {
    check_keys(v, where, {"type", "A", "b"});
    const Eigen::MatrixXd a = matrix(field(v, "A", where), where + ".A", 3);
    if (a.rows() != 3) fail(where + ".A", "expected a 3 x 3 matrix");
    return ConvexSet::ellipsoid(name, a, vec3(field(v, "b", where), where + ".b"));
  }
  if (type == "ball") {
    check_keys(v, where, {"type", "center", "radius"});
    return ConvexSet::ball(name, vec3(field(v, "center", where), where + ".center"),
                           number(field(v, "radius", where), where + ".radius"));
  }
  if (type == "soc") {
    check_keys(v, where, {"type", "cones"});
    const json& cones = field(v, "cones", where);
    if (!cones.is_array()) fail(where + ".cones", "expected an array");
    std::vector<ConvexSet::Cone> out;
    for (std::size_t k = 0; k < cones.size(); ++k) {
      const std::string w = where + ".cones[" + std::to_string(k) + "]";
      check_keys(cones[k], w, {"A", "b", "c", "d"});
      ConvexSet::Cone c;
      c.a = cones[k].contains("A") ? matrix(cones[k]["A"], w + ".A", 3) : Eigen::MatrixXd(0, 3);
      c.b = cones[k].contains("b") ? vector(cones[k]["b"], w + ".b", static_cast<int>(c.a.rows()))
                                   : Eigen::VectorXd::Zero(c.a.rows());
      c.c = cones[k].contains("c") ? vec3(cones[k]["c"], w + ".c") : Vector3d::Zero();
      c.d = number(field(cones[k], "d", w), w + ".d");
      out.push_back(std::move(c));
    }
    return ConvexSet(name, std::move(out));
  }
  fail(where + ".type", "unknown set type '" + type + "'");
}

std::vector<Vector3d> parse_pins(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array indexed by derivative order");
  std::vector<Vector3d> out;
  for (std::size_t r = 0; r < v.size(); ++r) out.push_back(vec3(v[r], where + "[" + std::to_string(r) + "]"));
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Scenario parse_scenario_json(const json& doc, const std::string& src) {
  check_keys(doc, src, {"version", "name", "gravity", "knots", "bounds", "sets", "waypoints", "pins",
                        "intervals", "corridor", "zeta_mode", "tracking_margins", "cbf", "sim",
                        "nominal", "solver"});
  const int version = integer(field(doc, "version", src), src + ".version");
  if (version != kScenarioVersion) {
    fail(src + ".version", "unsupported version " + std::to_string(version));
  }
  Scenario sc;
  sc.name = doc.value("name", std::string("unnamed"));
  PlanningProblem& p = sc.problem;
  if (doc.contains("gravity")) p.gravity = number(doc["gravity"], src + ".gravity");

  const std::string kw = src + ".knots";
  const json& knots = field(doc, "knots", src);
  check_keys(knots, kw, {"t0", "tf", "n", "degree"});
  p.t0 = number(field(knots, "t0", kw), kw + ".t0");
  p.tf = number(field(knots, "tf", kw), kw + ".tf");
  p.n = integer(field(knots, "n", kw), kw + ".n");
  p.degree = integer(field(knots, "degree", kw), kw + ".degree");

  std::map<std::string, ConvexSet> sets;
  if (doc.contains("sets")) {
    const json& s = doc["sets"];
    if (!s.is_object()) fail(src + ".sets", "expected an object of named sets");
    for (const auto& item : s.items()) {
      sets.emplace(item.key(), parse_set(item.key(), item.value(), src + ".sets." + item.key()));
    }
  }
  auto lookup = [&](const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a set name");
    const auto it = sets.find(v.get<std::string>());
    if (it == sets.end()) fail(where, "unknown set '" + v.get<std::string>() + "'");
    return it->second;
  };

  if (doc.contains("bounds")) {
    const std::string bw = src + ".bounds";
    const json& b = doc["bounds"];
    check_keys(b, bw, {"v_max", "eps_deg", "thrust_min", "thrust_max", "omega_max_deg_s", "position"});
    p.bounds.v_max = opt_number(b, "v_max", bw);
    p.bounds.eps = opt_number(b, "eps_deg", bw, kDeg);
    p.bounds.thrust_min = opt_number(b, "thrust_min", bw);
    p.bounds.thrust_max = opt_number(b, "thrust_max", bw);
    p.bounds.omega_max = opt_number(b, "omega_max_deg_s", bw, kDeg);
    if (b.contains("position")) {
      const json& names = b["position"];
      if (!names.is_array()) fail(bw + ".position", "expected an array of set names");
      for (std::size_t k = 0; k < names.size(); ++k) {
        p.bounds.position_sets.push_back(lookup(names[k], bw + ".position[" + std::to_string(k) + "]"));
      }
    }
  }

  if (doc.contains("waypoints")) {
    const json& w = doc["waypoints"];
    if (!w.is_array()) fail(src + ".waypoints", "expected an array");
    for (std::size_t k = 0; k < w.size(); ++k) {
      const std::string ww = src + ".waypoints[" + std::to_string(k) + "]";
      check_keys(w[k], ww, {"p", "t", "radius"});
      p.waypoints.push_back({vec3(field(w[k], "p", ww), ww + ".p"), number(field(w[k], "t", ww), ww + ".t"),
                             w[k].contains("radius") ? number(w[k]["radius"], ww + ".radius") : 0.0});
    }
  }

  if (doc.contains("pins")) {
    const std::string pw = src + ".pins";
    check_keys(doc["pins"], pw, {"initial", "final"});
    if (doc["pins"].contains("initial")) p.pins.initial = parse_pins(doc["pins"]["initial"], pw + ".initial");
    if (doc["pins"].contains("final")) p.pins.final = parse_pins(doc["pins"]["final"], pw + ".final");
  }

  if (doc.contains("intervals")) {
    const json& iv = doc["intervals"];
    if (!iv.is_array()) fail(src + ".intervals", "expected an array");
    for (std::size_t k = 0; k < iv.size(); ++k) {
      const std::string w = src + ".intervals[" + std::to_string(k) + "]";
      check_keys(iv[k], w, {"window", "kind", "set", "bound"});
      const Eigen::VectorXd win = vector(field(iv[k], "window", w), w + ".window", 2);
      IntervalConstraint ic;
      ic.t1 = win[0];
      ic.t2 = win[1];
      const std::string kind = field(iv[k], "kind", w).get<std::string>();
      if (kind == "position") {
        ic.kind = IntervalConstraint::Kind::kPositionInSet;
        ic.set = lookup(field(iv[k], "set", w), w + ".set");
      } else if (kind == "speed") {
        ic.kind = IntervalConstraint::Kind::kSpeedBound;
        ic.bound = number(field(iv[k], "bound", w), w + ".bound");
      } else {
        fail(w + ".kind", "expected 'position' or 'speed'");
      }
      p.intervals.push_back(std::move(ic));
    }
  }

  if (doc.contains("corridor")) {
    const json& c = doc["corridor"];
    if (!c.is_array()) fail(src + ".corridor", "expected an array");
    Corridor corridor;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const std::string w = src + ".corridor[" + std::to_string(k) + "]";
      if (c[k].is_string()) {
        corridor.sets.push_back(lookup(c[k], w));
        continue;
      }
      check_keys(c[k], w, {"set", "repeat"});
      const ConvexSet set = lookup(field(c[k], "set", w), w + ".set");
      const int repeat = c[k].contains("repeat") ? integer(c[k]["repeat"], w + ".repeat") : 1;
      if (repeat < 1) fail(w + ".repeat", "must be positive");
      for (int r = 0; r < repeat; ++r) corridor.sets.push_back(set);
    }
    p.corridor = std::move(corridor);
  }

  if (doc.contains("zeta_mode")) p.zeta_mode = parse_zeta_mode(doc["zeta_mode"].get<std::string>());

  if (doc.contains("cbf")) {
    const std::string cw = src + ".cbf";
    const json& c = doc["cbf"];
    check_keys(c, cw, {"delta", "a1", "a2"});
    sc.cbf = make_cbf_params(number(field(c, "delta", cw), cw + ".delta"), number(field(c, "a1", cw), cw + ".a1"),
                             number(field(c, "a2", cw), cw + ".a2"));
  }
  if (doc.contains("tracking_margins")) {
    if (!doc["tracking_margins"].is_boolean()) fail(src + ".tracking_margins", "expected a boolean");
    if (doc["tracking_margins"].get<bool>()) p.tracking_margins = sc.cbf;
  }

  sc.sim.duration = p.tf - p.t0;
  sc.sim.start_time = p.t0;
  if (doc.contains("sim")) {
    const std::string sw = src + ".sim";
    const json& s = doc["sim"];
    check_keys(s, sw, {"control_rate_hz", "substeps", "duration", "initial_state"});
    if (s.contains("control_rate_hz")) sc.sim.control_rate_hz = number(s["control_rate_hz"], sw + ".control_rate_hz");
    if (s.contains("substeps")) sc.sim.substeps = integer(s["substeps"], sw + ".substeps");
    if (s.contains("duration")) sc.sim.duration = number(s["duration"], sw + ".duration");
    if (s.contains("initial_state")) {
      const std::string iw = sw + ".initial_state";
      check_keys(s["initial_state"], iw, {"r", "v"});
      TrackState z;
      z.r = vec3(field(s["initial_state"], "r", iw), iw + ".r");
      z.r1 = vec3(field(s["initial_state"], "v", iw), iw + ".v");
      sc.sim.initial_state = z;
    }
  }

  if (doc.contains("nominal")) {
    const std::string nw = src + ".nominal";
    const json& n = doc["nominal"];
    check_keys(n, nw, {"preset", "kp", "kd", "feedforward"});
    if (n.contains("preset")) {
      const std::string preset = n["preset"].get<std::string>();
      if (preset == "detuned") {
        sc.nominal = PdGains::detuned();
      } else if (preset != "default") {
        fail(nw + ".preset", "expected 'default' or 'detuned'");
      }
    }
    if (n.contains("kp")) sc.nominal.kp = number(n["kp"], nw + ".kp");
    if (n.contains("kd")) sc.nominal.kd = number(n["kd"], nw + ".kd");
    if (n.contains("feedforward")) sc.nominal.feedforward = number(n["feedforward"], nw + ".feedforward");
  }

  if (doc.contains("solver")) {
    const std::string vw = src + ".solver";
    check_keys(doc["solver"], vw, {"tol", "max_iterations"});
    if (doc["solver"].contains("tol")) {
      const double tol = number(doc["solver"]["tol"], vw + ".tol");
      p.solver.feasibility_tol = p.solver.objective_tol = tol;
    }
    if (doc["solver"].contains("max_iterations")) {
      p.solver.max_iterations = integer(doc["solver"]["max_iterations"], vw + ".max_iterations");
    }
  }
  return sc;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(source, e.what());
  }
}

json state_json(const TrackState& z) { return {{"r", to_json(z.r)}, {"v", to_json(z.r1)}}; }

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  try {
    return parse_scenario_json(doc, source);
  } catch (const json::exception& e) {
    fail(source, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    fail(source, e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.string());
}

std::string write_plan_document(const TrajectoryPlan& plan, const std::string& scenario_name) {
  json doc;
  doc["format"] = "safeflight-plan";
  doc["version"] = kScenarioVersion;
  doc["scenario"] = scenario_name;
  const KnotVector& k = plan.curve.knots();
  doc["knots"] = {{"degree", k.degree()}, {"tau", k.values()}};
  json pts = json::array();
  for (int axis = 0; axis < plan.curve.dimension(); ++axis) {
    pts.push_back(to_json(plan.curve.control_points().row(axis).transpose()));
  }
  doc["control_points"] = pts;
  doc["zeta_mode"] = to_string(plan.zeta_mode);
  doc["zeta"] = to_json(plan.zeta);
  doc["stats"] = {{"objective", plan.stats.objective},
                  {"snap", plan.stats.snap},
                  {"iterations", plan.stats.iterations},
                  {"max_residual", plan.stats.max_residual}};
  return doc.dump(2) + "\n";
}

TrajectoryPlan parse_plan_document(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  try {
    if (doc.value("format", std::string()) != "safeflight-plan") fail(source, "not a plan document");
    const json& knots = field(doc, "knots", source);
    KnotVector kv(knots.at("tau").get<std::vector<double>>(), knots.at("degree").get<int>());
    const json& pts = field(doc, "control_points", source);
    if (!pts.is_array() || pts.empty()) fail(source + ".control_points", "expected rows");
    Eigen::MatrixXd p(static_cast<Eigen::Index>(pts.size()), kv.control_count());
    for (std::size_t a = 0; a < pts.size(); ++a) {
      p.row(static_cast<Eigen::Index>(a)) =
          vector(pts[a], source + ".control_points[" + std::to_string(a) + "]", kv.control_count()).transpose();
    }
    TrajectoryPlan plan{SplineCurve(kv, p), vector(field(doc, "zeta", source), source + ".zeta"),
                        parse_zeta_mode(doc.value("zeta_mode", std::string("vector"))),
                        {}};
    if (doc.contains("stats")) {
      const json& s = doc["stats"];
      plan.stats.objective = s.value("objective", 0.0);
      plan.stats.snap = s.value("snap", 0.0);
      plan.stats.iterations = s.value("iterations", 0);
      plan.stats.max_residual = s.value("max_residual", 0.0);
    }
    return plan;
  } catch (const json::exception& e) {
    fail(source, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    fail(source, e.what());
  }
}

TrajectoryPlan load_plan(const std::filesystem::path& path) {
  return parse_plan_document(read_text_file(path), path.string());
}

std::string write_trace_document(const TraceDocument& doc) {
  json out;
  out["format"] = "safeflight-trace";
  out["version"] = kScenarioVersion;
  out["scenario"] = doc.scenario;
  out["filtered"] = doc.filtered;
  const CertificateReport& c = doc.certificates;
  out["certificates"] = {{"max_position_error", c.max_position_error}, {"delta", c.delta},
                         {"max_velocity_error", c.max_velocity_error}, {"velocity_bound", c.velocity_bound},
                         {"max_input_deviation", c.max_input_deviation}, {"input_bound", c.input_bound},
                         {"min_barrier", c.min_barrier}};
  out["substep_max_position_error"] = doc.trace.max_position_error;
  out["substep_max_velocity_error"] = doc.trace.max_velocity_error;
  json recs = json::array();
  for (const auto& r : doc.trace.records) {
    const TickCommand& cmd = r.command;
    recs.push_back({{"t", r.t},
                    {"state", state_json(r.state)},
                    {"ref", {{"r", to_json(r.ref.r)}, {"v", to_json(r.ref.r1)}, {"a", to_json(r.ref.r2)}}},
                    {"mu_nominal", to_json(cmd.mu_nominal)},
                    {"mu", to_json(cmd.mu)},
                    {"input", {cmd.input.thrust, cmd.input.phi, cmd.input.theta, cmd.input.psi}},
                    {"barrier", cmd.barrier},
                    {"active", cmd.active}});
  }
  out["records"] = recs;
  return out.dump(1) + "\n";
}

TraceDocument parse_trace_document(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  try {
    if (doc.value("format", std::string()) != "safeflight-trace") fail(source, "not a trace document");
    TraceDocument out;
    out.scenario = doc.value("scenario", std::string());
    out.filtered = doc.value("filtered", true);
    const json& c = field(doc, "certificates", source);
    out.certificates.max_position_error = c.at("max_position_error").get<double>();
    out.certificates.delta = c.at("delta").get<double>();
    out.certificates.max_velocity_error = c.at("max_velocity_error").get<double>();
    out.certificates.velocity_bound = c.at("velocity_bound").get<double>();
    out.certificates.max_input_deviation = c.at("max_input_deviation").get<double>();
    out.certificates.input_bound = c.at("input_bound").get<double>();
    out.certificates.min_barrier = c.at("min_barrier").get<double>();
    out.trace.max_position_error = doc.value("substep_max_position_error", 0.0);
    out.trace.max_velocity_error = doc.value("substep_max_velocity_error", 0.0);
    for (const auto& r : field(doc, "records", source)) {
      SimRecord rec;
      rec.t = r.at("t").get<double>();
      rec.state.r = vec3(r.at("state").at("r"), source);
      rec.state.r1 = vec3(r.at("state").at("v"), source);
      rec.ref.r = vec3(r.at("ref").at("r"), source);
      rec.ref.r1 = vec3(r.at("ref").at("v"), source);
      rec.ref.r2 = vec3(r.at("ref").at("a"), source);
      rec.command.mu_nominal = vec3(r.at("mu_nominal"), source);
      rec.command.mu = vec3(r.at("mu"), source);
      const Eigen::VectorXd in = vector(r.at("input"), source, 4);
      rec.command.input = {in[0], in[1], in[2], in[3]};
      rec.command.barrier = r.at("barrier").get<BarrierValues>();
      rec.command.active = r.at("active").get<std::uint8_t>();
      out.trace.records.push_back(rec);
    }
    return out;
  } catch (const json::exception& e) {
    fail(source, e.what());
  }
}

TraceDocument load_trace(const std::filesystem::path& path) {
  return parse_trace_document(read_text_file(path), path.string());
}

std::string write_report_document(const ConstraintReport& report, const SpanMinimaReport& spans) {
  json out;
  out["format"] = "safeflight-report";
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"name", e.name}, {"margin", e.margin}, {"time", e.time}, {"samples", e.samples}});
  }
  out["margins"] = entries;
  out["span_thrust_margin"] = spans.thrust_margin;
  out["span_jerk_margin"] = spans.jerk_margin;
  out["ok"] = report.ok() && spans.ok();
  return out.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace safeflight
