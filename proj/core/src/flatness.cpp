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

#include "safeflight/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "safeflight/error.hpp"

namespace safeflight {
namespace {

constexpr double kSingularityThreshold = 1e-6;

double clamped_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }

}  // namespace

Gravity::Gravity(double g) : g_(g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw Error(ErrorCode::kInvalidArgument, "gravity must be positive");
  }
}

Eigen::Vector3d body_z_axis(double phi, double theta, double psi) {
  const double sf = std::sin(phi), cf = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(psi), cp = std::cos(psi);
  return {sf * sp + cf * st * cp, cf * st * sp - sf * cp, cf * ct};
}

FlatState flat_to_state_input(const FlatSample& s, Gravity g) {
  const Eigen::Vector3d z_w = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d thrust_vec = s.r2 + g.value() * z_w;
  const double thrust = thrust_vec.norm();
  if (thrust < kSingularityThreshold) {
    throw Error(ErrorCode::kSingularThrust,
                "flat map undefined: thrust vector vanishes (free fall)");
  }
  const Eigen::Vector3d y_c(-std::sin(s.psi), std::cos(s.psi), 0.0);
  const Eigen::Vector3d z_b = thrust_vec / thrust;
  const Eigen::Vector3d cross = y_c.cross(z_b);
  const double cross_norm = cross.norm();
  if (cross_norm < kSingularityThreshold) {
    throw Error(ErrorCode::kSingularAttitude,
                "flat map undefined: z_B parallel to y_C");
  }
  const Eigen::Vector3d x_b = cross / cross_norm;
  const Eigen::Vector3d y_b = z_b.cross(x_b);
  const Eigen::Vector3d h_omega = (s.r3 - z_b.dot(s.r3) * z_b) / thrust;

  FlatState out;
  const double sin_theta = z_w.dot(x_b);
  out.state.r = s.r;
  out.state.r1 = s.r1;
  out.state.xi.x() = clamped_asin(z_w.dot(y_b) / std::cos(clamped_asin(sin_theta)));
  out.state.xi.y() = -clamped_asin(sin_theta);
  out.state.xi.z() = s.psi;
  out.input.thrust = thrust;
  out.input.omega.x() = -y_b.dot(h_omega);
  out.input.omega.y() = x_b.dot(h_omega);
  out.input.omega.z() = z_b.dot(s.psi1 * z_w);
  return out;
}

VirtualInput virtual_from_attitude(const ReducedInput& v, Gravity g) {
  return v.thrust * body_z_axis(v.phi, v.theta, v.psi) -
         g.value() * Eigen::Vector3d::UnitZ();
}

ReducedInput attitude_from_virtual(const VirtualInput& mu, double psi, Gravity g) {
  const double lift = mu.z() + g.value();
  if (!(lift > 0.0)) {
    throw Error(ErrorCode::kInvertedFlight,
                "commanded acceleration leaves the upright hemisphere (mu_3 + g = " +
                    std::to_string(lift) + ")");
  }
  const double sp = std::sin(psi), cp = std::cos(psi);
  ReducedInput v;
  v.psi = psi;
  v.theta = std::atan((mu.x() * cp + mu.y() * sp) / lift);
  v.phi = std::atan((mu.x() * sp - mu.y() * cp) * std::cos(v.theta) / lift);
  v.thrust = std::sqrt(mu.x() * mu.x() + mu.y() * mu.y() + lift * lift);
  return v;
}

double tilt_cone_margin(const Eigen::Vector3d& accel, double eps, double offset,
                        Gravity g) {
  const double cot = std::abs(1.0 / std::tan(eps));
  return accel.z() + g.value() - offset - cot * accel.head<2>().norm();
}

}  // namespace safeflight
