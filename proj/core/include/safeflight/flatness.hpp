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

#include <Eigen/Dense>

namespace safeflight {

inline constexpr double kStandardGravity = 9.81;

// Gravitational acceleration magnitude (m/s^2); always positive.
class Gravity {
 public:
  explicit Gravity(double g = kStandardGravity);
  double value() const { return g_; }

 private:
  double g_;
};

// Flat output sigma = (r, psi) with the derivatives the flat map consumes.
struct FlatSample {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d r1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d r2 = Eigen::Vector3d::Zero();
  Eigen::Vector3d r3 = Eigen::Vector3d::Zero();
  double psi = 0.0;
  double psi1 = 0.0;
};

// x = [r, (phi, theta, psi), r'], Z-Y-X Euler angles.
struct QuadState {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d xi = Eigen::Vector3d::Zero();
  Eigen::Vector3d r1 = Eigen::Vector3d::Zero();
};

// u = [T, p, q, r] with T the mass-normalized thrust.
struct QuadInput {
  double thrust = 0.0;
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
};

struct FlatState {
  QuadState state;
  QuadInput input;
};

// v = [T, phi, theta, psi] of the reduced (position-level) model.
struct ReducedInput {
  double thrust = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
};

// mu = T z_B - g z_W, the commanded acceleration.
using VirtualInput = Eigen::Vector3d;

// Third column of R_B^W for Z-Y-X angles.
Eigen::Vector3d body_z_axis(double phi, double theta, double psi);

// Full state and input from flat output derivatives. Throws
// ErrorCode::kSingularThrust when the thrust vector vanishes and
// ErrorCode::kSingularAttitude when z_B is parallel to y_C.
FlatState flat_to_state_input(const FlatSample& s, Gravity g = Gravity());

VirtualInput virtual_from_attitude(const ReducedInput& v, Gravity g = Gravity());

// Inverse of virtual_from_attitude for a given yaw. Throws
// ErrorCode::kInvertedFlight when mu_3 + g <= 0.
ReducedInput attitude_from_virtual(const VirtualInput& mu, double psi,
                                   Gravity g = Gravity());

// Membership in the tilt cone K_eps = {a : |cot eps| ||(a_x, a_y)|| <= a_z + g - offset}.
// Returns the signed margin (a_z + g - offset) - |cot eps| ||(a_x, a_y)||.
double tilt_cone_margin(const Eigen::Vector3d& accel, double eps, double offset,
                        Gravity g = Gravity());

}  // namespace safeflight
