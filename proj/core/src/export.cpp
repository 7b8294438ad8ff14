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

#include "safeflight/export.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

#include "safeflight/error.hpp"

namespace safeflight {
namespace {

constexpr double kToDeg = 180.0 / std::numbers::pi;

void row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << v;
    first = false;
  }
}

}  // namespace

void export_plan_columns(const TrajectoryPlan& plan, int samples_per_span, std::ostream& out, Gravity g) {
  if (samples_per_span < 1) throw Error(ErrorCode::kInvalidArgument, "samples_per_span must be positive");
  out << "t,x,y,z,speed,phi_deg,theta_deg,T,p_deg_s,q_deg_s,zeta_active\n";
  out << std::setprecision(10);
  const KnotVector& k = plan.curve.knots();
  const int d = k.degree();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int l = k.first_span(); l <= k.last_span(); ++l) {
    const double a = k[l];
    const double b = k[l + 1];
    if (!(a < b)) continue;
    const bool last = l == k.last_span();
    const int count = samples_per_span + (last ? 1 : 0);
    double zeta = nan;
    if (plan.zeta.size() > 0) zeta = plan.zeta_mode == ZetaMode::kScalar ? plan.zeta[0] : plan.zeta[l - d];
    for (int s = 0; s < count; ++s) {
      const double t = a + (b - a) * s / samples_per_span;
      FlatSample fs;
      fs.r = curve_eval(plan.curve, 0, t);
      fs.r1 = curve_eval(plan.curve, 1, t);
      fs.r2 = curve_eval(plan.curve, 2, t);
      fs.r3 = curve_eval(plan.curve, 3, t);
      double phi = nan, theta = nan, thrust = nan, p = nan, q = nan;
      try {
        const FlatState st = flat_to_state_input(fs, g);
        phi = st.state.xi[0] * kToDeg;
        theta = st.state.xi[1] * kToDeg;
        thrust = st.input.thrust;
        p = st.input.omega[0] * kToDeg;
        q = st.input.omega[1] * kToDeg;
      } catch (const Error&) {
        // Singular samples are written as NaN.
      }
      row(out, {t, fs.r[0], fs.r[1], fs.r[2], fs.r1.norm(), phi, theta, thrust, p, q, zeta});
      out << '\n';
    }
  }
}

void export_trace_columns(const SimTrace& trace, std::ostream& out) {
  out << "t,x,y,z,x_ref,y_ref,z_ref,mu_nom_x,mu_nom_y,mu_nom_z,mu_x,mu_y,mu_z,T,phi_deg,theta_deg,"
         "h_xu,h_xl,h_yu,h_yl,h_zu,h_zl,active\n";
  out << std::setprecision(10);
  for (const auto& r : trace.records) {
    const TickCommand& c = r.command;
    row(out, {r.t, r.state.r[0], r.state.r[1], r.state.r[2], r.ref.r[0], r.ref.r[1], r.ref.r[2],
              c.mu_nominal[0], c.mu_nominal[1], c.mu_nominal[2], c.mu[0], c.mu[1], c.mu[2],
              c.input.thrust, c.input.phi * kToDeg, c.input.theta * kToDeg, c.barrier[0], c.barrier[1],
              c.barrier[2], c.barrier[3], c.barrier[4], c.barrier[5]});
    out << ',' << static_cast<int>(c.active) << '\n';
  }
}

}  // namespace safeflight
