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

#include "safeflight/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "safeflight/error.hpp"

namespace safeflight {

ReferenceSampler curve_reference(const SplineCurve& curve) {
  return [curve](double t) {
    ReferencePoint ref;
    const double tc = std::clamp(t, curve.knots().start(), curve.knots().end());
    ref.r = curve_eval(curve, 0, tc);
    if (t <= curve.knots().end()) {
      ref.r1 = curve_eval(curve, 1, tc);
      ref.r2 = curve_eval(curve, 2, tc);
    }
    return ref;
  };
}

Controller tracking_controller(const CbfParams& params, const PdGains& gains, bool filtered,
                               Gravity g) {
  return [params, gains, filtered, g](double, const TrackState& z, const ReferencePoint& ref) {
    TickCommand cmd;
    cmd.mu_nominal = nominal_virtual_input(z, ref, gains);
    if (filtered) {
      const SafeCommand safe = safe_step(z, ref, cmd.mu_nominal, params, 0.0, g);
      cmd.mu = safe.mu_star;
      cmd.input = safe.v_s;
      cmd.barrier = safe.barrier;
      cmd.active = safe.active;
    } else {
      cmd.mu = cmd.mu_nominal;
      cmd.input = attitude_from_virtual(cmd.mu, 0.0, g);
      cmd.barrier = barrier_values(z, ref, params);
    }
    return cmd;
  };
}

TrackState rk4_step(const TrackState& z, const Eigen::Vector3d& mu, double h) {
  // z' = (r', mu); velocity stages are affine in the stage time.
  const Eigen::Vector3d k1r = z.r1;
  const Eigen::Vector3d k2r = z.r1 + 0.5 * h * mu;
  const Eigen::Vector3d k3r = z.r1 + 0.5 * h * mu;
  const Eigen::Vector3d k4r = z.r1 + h * mu;
  TrackState out;
  out.r = z.r + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
  out.r1 = z.r1 + h * mu;
  return out;
}

SimTrace simulate(const ReferenceSampler& reference, const Controller& controller,
                  const SimConfig& cfg) {
  if (!(cfg.control_rate_hz > 0.0) || cfg.substeps < 1 || !(cfg.duration >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "simulation needs positive rate, substeps and duration");
  }
  const double h = cfg.step();
  const double tick = 1.0 / cfg.control_rate_hz;
  const long ticks = std::lround(std::floor(cfg.duration / tick + 1e-9));

  SimTrace trace;
  trace.records.reserve(static_cast<std::size_t>(ticks) + 1);
  TrackState z;
  if (cfg.initial_state) {
    z = *cfg.initial_state;
  } else {
    const ReferencePoint r0 = reference(cfg.start_time);
    z.r = r0.r;
    z.r1 = r0.r1;
  }
  auto track_error = [&](double t, const TrackState& s) {
    const ReferencePoint ref = reference(t);
    trace.max_position_error = std::max(trace.max_position_error, (s.r - ref.r).lpNorm<Eigen::Infinity>());
    trace.max_velocity_error = std::max(trace.max_velocity_error, (s.r1 - ref.r1).lpNorm<Eigen::Infinity>());
  };

  for (long k = 0; k <= ticks; ++k) {
    const double t = cfg.start_time + static_cast<double>(k) * tick;
    const ReferencePoint ref = reference(t);
    track_error(t, z);
    SimRecord rec{t, z, ref, controller(t, z, ref)};
    trace.records.push_back(rec);
    if (k == ticks) break;
    for (int s = 1; s <= cfg.substeps; ++s) {
      z = rk4_step(z, rec.command.mu, h);
      if (s < cfg.substeps) track_error(t + s * h, z);
    }
  }
  return trace;
}

bool CertificateReport::holds(double slack) const {
  return max_position_error <= delta + slack && max_velocity_error <= velocity_bound + slack &&
         max_input_deviation <= input_bound && min_barrier >= -slack;
}

CertificateReport certificates(const SimTrace& trace, const CbfParams& params) {
  CertificateReport rep;
  rep.delta = params.delta;
  rep.velocity_bound = params.velocity_bound();
  rep.input_bound = params.input_deviation_bound();
  rep.max_position_error = trace.max_position_error;
  rep.max_velocity_error = trace.max_velocity_error;
  rep.min_barrier = trace.records.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.records) {
    rep.max_input_deviation =
        std::max(rep.max_input_deviation, (rec.command.mu - rec.ref.r2).lpNorm<Eigen::Infinity>());
    for (double h : rec.command.barrier) rep.min_barrier = std::min(rep.min_barrier, h);
  }
  // Substep tube error bounds the barrier between ticks as well.
  rep.min_barrier = std::min(rep.min_barrier, params.delta - trace.max_position_error);
  return rep;
}

}  // namespace safeflight
