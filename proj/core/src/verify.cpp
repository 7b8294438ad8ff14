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

#include "safeflight/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "safeflight/error.hpp"
#include "safeflight/flatness.hpp"

namespace safeflight {
namespace {

using Eigen::Vector3d;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Worst {
  double value = kInf;
  double time = 0.0;
  long samples = 0;
  void take(double v, double t) {
    if (v < value) {
      value = v;
      time = t;
    }
  }
};

// Minimum of f on [a, b]: dense samples, then golden-section search in the
// bracket around the smallest sample.
Worst minimize(double a, double b, int samples, const std::function<double(double)>& f) {
  Worst w;
  int best = 0;
  const double h = (b - a) / samples;
  for (int k = 0; k <= samples; ++k) {
    const double t = k == samples ? b : a + k * h;
    const double v = f(t);
    if (v < w.value) {
      w.value = v;
      w.time = t;
      best = k;
    }
  }
  w.samples = samples + 1;
  double lo = std::max(a, a + (best - 1) * h);
  double hi = std::min(b, a + (best + 1) * h);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  w.take(f1, x1);
  w.take(f2, x2);
  return w;
}

struct Sample {
  Vector3d r, r1, r2, r3;
  FlatState flat;
};

class Sampler {
 public:
  Sampler(const SplineCurve& curve, double g) : curve_(curve), g_(g) {}
  Sample at(double t) const {
    Sample s;
    s.r = curve_eval(curve_, 0, t);
    s.r1 = curve_eval(curve_, 1, t);
    s.r2 = curve_eval(curve_, 2, t);
    s.r3 = curve_eval(curve_, 3, t);
    FlatSample fs;
    fs.r = s.r;
    fs.r1 = s.r1;
    fs.r2 = s.r2;
    fs.r3 = s.r3;
    s.flat = flat_to_state_input(fs, Gravity(g_));
    return s;
  }

 private:
  const SplineCurve& curve_;
  double g_;
};

struct SampledClass {
  std::string name;
  std::function<double(const Sample&)> margin;
  // Restricts sampling to [t1, t2] when set.
  double t1 = -kInf;
  double t2 = kInf;
};

double abs_cot(double eps) { return std::abs(1.0 / std::tan(eps)); }

double cone_slack(const ConvexSet& set, const Vector3d& p) { return set.margin(p); }

}  // namespace

const MarginEntry* ConstraintReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

double ConstraintReport::worst_margin() const {
  double w = kInf;
  for (const auto& e : entries) w = std::min(w, e.margin);
  return w;
}

ConstraintReport verify_plan(const TrajectoryPlan& plan, const PlanningProblem& problem,
                             int samples_per_span) {
  if (samples_per_span < 1) throw Error(ErrorCode::kInvalidArgument, "samples_per_span must be positive");
  const SplineCurve& curve = plan.curve;
  const KnotVector& knots = curve.knots();
  const double g = problem.gravity;
  const int d = knots.degree();
  const int n = knots.last_index();
  const SafetyBounds& b = problem.bounds;

  // Bounds the reference must meet, including tracking-margin shrinkage.
  std::optional<double> thrust_max = b.thrust_max;
  double offset = b.angle_cone_offset;
  if (problem.tracking_margins) {
    const double dev = 4.0 * problem.tracking_margins->delta * problem.tracking_margins->a2;
    if (thrust_max) *thrust_max -= std::sqrt(3.0) * dev;
    if (b.eps) offset += dev * (1.0 + std::sqrt(2.0) * abs_cot(*b.eps));
  }

  std::vector<SampledClass> classes;
  if (b.v_max) {
    const double v = *b.v_max;
    classes.push_back({"speed", [v](const Sample& s) { return v - s.r1.norm(); }});
  }
  if (b.eps) {
    const double eps = *b.eps;
    classes.push_back({"tilt", [eps](const Sample& s) {
                         return eps - std::max(std::abs(s.flat.state.xi.x()), std::abs(s.flat.state.xi.y()));
                       }});
    if (offset > 0.0) {
      const double k = abs_cot(eps);
      classes.push_back({"tilt-cone", [k, g, offset](const Sample& s) {
                           return s.r2.z() + g - offset - k * s.r2.head<2>().norm();
                         }});
    }
  }
  if (thrust_max) {
    const double t = *thrust_max;
    classes.push_back({"thrust-max", [t](const Sample& s) { return t - s.flat.input.thrust; }});
  }
  if (b.thrust_min) {
    const double t = *b.thrust_min;
    classes.push_back({"thrust-min", [t](const Sample& s) { return s.flat.input.thrust - t; }});
  }
  if (b.omega_max) {
    const double w = *b.omega_max;
    classes.push_back({"body-rate", [w](const Sample& s) {
                         return w - std::max(std::abs(s.flat.input.omega.x()), std::abs(s.flat.input.omega.y()));
                       }});
  }
  for (const auto& set : b.position_sets) {
    classes.push_back({"position:" + set.name(), [set](const Sample& s) { return cone_slack(set, s.r); }});
  }
  for (std::size_t k = 0; k < problem.intervals.size(); ++k) {
    const IntervalConstraint& ic = problem.intervals[k];
    const std::string name = "interval" + std::to_string(k);
    if (ic.kind == IntervalConstraint::Kind::kPositionInSet) {
      const ConvexSet set = ic.set;
      classes.push_back({name + ":position", [set](const Sample& s) { return cone_slack(set, s.r); }, ic.t1, ic.t2});
    } else {
      const double v = ic.bound;
      classes.push_back({name + ":speed", [v](const Sample& s) { return v - s.r1.norm(); }, ic.t1, ic.t2});
    }
  }
  if (problem.corridor) {
    const auto& sets = problem.corridor->sets;
    for (std::size_t l = 0; l < sets.size(); ++l) {
      const ConvexSet set = sets[l];
      const double t1 = knots[d + static_cast<int>(l)];
      const double t2 = knots[d + static_cast<int>(l) + 1];
      classes.push_back({"corridor" + std::to_string(l + 1) + ":" + set.name(),
                         [set](const Sample& s) { return cone_slack(set, s.r); }, t1, t2});
    }
  }

  const Sampler sampler(curve, g);
  ConstraintReport report;
  for (const auto& cls : classes) {
    Worst worst;
    for (int i = knots.first_span(); i <= knots.last_span(); ++i) {
      const double a = std::max(knots[i], cls.t1);
      const double e = std::min(knots[i + 1], cls.t2);
      if (!(a < e)) continue;
      const Worst w = minimize(a, e, samples_per_span,
                               [&](double t) { return cls.margin(sampler.at(t)); });
      worst.take(w.value, w.time);
      worst.samples += w.samples;
    }
    report.entries.push_back({cls.name, worst.value, worst.time, worst.samples});
  }

  if (!problem.waypoints.empty()) {
    Worst w;
    for (const auto& wp : problem.waypoints) {
      w.take(wp.radius - (curve_eval(curve, 0, wp.t) - wp.p).norm(), wp.t);
      ++w.samples;
    }
    report.entries.push_back({"waypoints", w.value, w.time, w.samples});
  }
  const auto pin_check = [&](const std::vector<Vector3d>& pins, double t, const std::string& name) {
    if (pins.empty()) return;
    Worst w;
    for (std::size_t r = 0; r < pins.size(); ++r) {
      w.take(-(curve_eval(curve, static_cast<int>(r), t) - pins[r]).lpNorm<Eigen::Infinity>(), t);
      ++w.samples;
    }
    report.entries.push_back({name, w.value, w.time, w.samples});
  };
  pin_check(problem.pins.initial, knots.start(), "pins-initial");
  pin_check(problem.pins.final, knots.end(), "pins-final");

  // Control-point certificates, recomputed from P B_r.
  Worst cert;
  const Eigen::MatrixXd& p0 = curve.virtual_points(0);
  const Eigen::MatrixXd& p1 = curve.virtual_points(1);
  const Eigen::MatrixXd& p2 = curve.virtual_points(2);
  const Eigen::MatrixXd& p3 = curve.virtual_points(3);
  for (int j = 0; j <= n; ++j) {
    for (const auto& set : b.position_sets) cert.take(set.margin(p0.col(j)), 0.0);
  }
  for (int j = 1; j <= n; ++j) {
    if (b.v_max) cert.take(*b.v_max - p1.col(j).norm(), 0.0);
  }
  for (int j = 2; j <= n; ++j) {
    const Vector3d a = p2.col(j);
    if (b.eps) cert.take(a.z() + g - offset - abs_cot(*b.eps) * a.head<2>().norm(), 0.0);
    if (thrust_max) cert.take(*thrust_max - (a + g * Vector3d::UnitZ()).norm(), 0.0);
    if (b.thrust_min) cert.take(a.z() + g - *b.thrust_min, 0.0);
  }
  if (b.omega_max && plan.zeta.size() > 0) {
    for (int l = d; l <= n; ++l) {
      const double zeta = plan.zeta_mode == ZetaMode::kScalar ? plan.zeta[0] : plan.zeta[l - d];
      for (int j = l - d + 2; j <= l; ++j) cert.take(p2(2, j) + g - zeta, 0.0);
      for (int j = l - d + 3; j <= l; ++j) cert.take(*b.omega_max * zeta - p3.col(j).norm(), 0.0);
    }
  }
  if (problem.corridor) {
    const auto& sets = problem.corridor->sets;
    for (std::size_t l = 1; l <= sets.size(); ++l) {
      for (int j = static_cast<int>(l); j <= static_cast<int>(l) + d; ++j) {
        cert.take(sets[l - 1].margin(p0.col(j - 1)), 0.0);
      }
    }
  }
  if (cert.value < kInf) report.entries.push_back({"control-point-certificates", cert.value, 0.0, 0});
  return report;
}

SpanMinimaReport verify_span_minima(const TrajectoryPlan& plan, double omega_max, double gravity,
                                    int samples_per_span) {
  const KnotVector& knots = plan.curve.knots();
  const int d = knots.degree();
  SpanMinimaReport rep;
  rep.thrust_margin = kInf;
  rep.jerk_margin = kInf;
  if (plan.zeta.size() == 0) {
    rep.thrust_margin = rep.jerk_margin = 0.0;
    return rep;
  }
  const Vector3d gz(0.0, 0.0, gravity);
  for (int i = knots.first_span(); i <= knots.last_span(); ++i) {
    SpanMinimum sm;
    sm.span = i;
    sm.zeta = plan.zeta_mode == ZetaMode::kScalar ? plan.zeta[0] : plan.zeta[i - d];
    const Worst t = minimize(knots[i], knots[i + 1], samples_per_span, [&](double s) {
      return (curve_eval(plan.curve, 2, s) + gz).norm();
    });
    const Worst j = minimize(knots[i], knots[i + 1], samples_per_span, [&](double s) {
      return -curve_eval(plan.curve, 3, s).norm();
    });
    sm.min_thrust = t.value;
    sm.max_jerk = -j.value;
    rep.thrust_margin = std::min(rep.thrust_margin, sm.min_thrust - sm.zeta);
    rep.jerk_margin = std::min(rep.jerk_margin, omega_max * sm.zeta - sm.max_jerk);
    rep.spans.push_back(sm);
  }
  return rep;
}

}  // namespace safeflight
