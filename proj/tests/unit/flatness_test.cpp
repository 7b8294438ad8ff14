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
#include <random>

#include <gtest/gtest.h>

#include "safeflight/error.hpp"
#include "safeflight/flatness.hpp"

namespace safeflight {
namespace {

constexpr double kG = kStandardGravity;

Eigen::Matrix3d rotation(const Eigen::Vector3d& xi) {
  return (Eigen::AngleAxisd(xi.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(xi.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(xi.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

// Cubic position and linear yaw, so every flat derivative is exact.
struct Polynomial {
  Eigen::Vector3d a0, a1, a2, a3;
  double b0 = 0.0, b1 = 0.0;

  FlatSample at(double t) const {
    FlatSample s;
    s.r = a0 + a1 * t + a2 * t * t + a3 * t * t * t;
    s.r1 = a1 + 2.0 * a2 * t + 3.0 * a3 * t * t;
    s.r2 = 2.0 * a2 + 6.0 * a3 * t;
    s.r3 = 6.0 * a3;
    s.psi = b0 + b1 * t;
    s.psi1 = b1;
    return s;
  }
};

TEST(Flatness, BodyZAxisIsThirdRotationColumn) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d xi(u(rng), u(rng), 2.0 * u(rng));
    EXPECT_LT((body_z_axis(xi.x(), xi.y(), xi.z()) - rotation(xi).col(2)).norm(), 1e-14);
  }
}

TEST(Flatness, HoverMapsToLevelAttitude) {
  FlatSample s;
  s.r = {1.0, 2.0, 3.0};
  const FlatState f = flat_to_state_input(s);
  EXPECT_NEAR(f.input.thrust, kG, 1e-14);
  EXPECT_NEAR(f.state.xi.norm(), 0.0, 1e-14);
  EXPECT_NEAR(f.input.omega.norm(), 0.0, 1e-14);
}

TEST(Flatness, AttitudeReproducesThrustDirection) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    FlatSample s;
    s.r2 = {u(rng), u(rng), u(rng)};
    s.psi = u(rng);
    const FlatState f = flat_to_state_input(s);
    const Eigen::Vector3d target = s.r2 + kG * Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d zb = body_z_axis(f.state.xi.x(), f.state.xi.y(), f.state.xi.z());
    EXPECT_LT((f.input.thrust * zb - target).norm(), 1e-12);
  }
}

TEST(Flatness, BodyRatesMatchDifferentiatedRotation) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial p;
    p.a0 = {u(rng), u(rng), u(rng)};
    p.a1 = {u(rng), u(rng), u(rng)};
    p.a2 = {u(rng), u(rng), u(rng)};
    p.a3 = {u(rng), u(rng), u(rng)};
    p.b0 = u(rng);
    p.b1 = u(rng);
    const double t = 0.5 + u(rng);
    const Eigen::Matrix3d rp = rotation(flat_to_state_input(p.at(t + h)).state.xi);
    const Eigen::Matrix3d rm = rotation(flat_to_state_input(p.at(t - h)).state.xi);
    const FlatState f = flat_to_state_input(p.at(t));
    const Eigen::Matrix3d skew = rotation(f.state.xi).transpose() * (rp - rm) / (2.0 * h);
    const Eigen::Vector3d fd(skew(2, 1), skew(0, 2), skew(1, 0));
    // p and q are exact; r follows the yaw-rate projection psi' (z_B . z_W).
    EXPECT_LT((f.input.omega - fd).head<2>().lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_NEAR(f.input.omega.z(), p.at(t).psi1 * body_z_axis(f.state.xi[0], f.state.xi[1], f.state.xi[2]).z(), 1e-12);
  }
}

TEST(Flatness, SingularitiesAreReported) {
  FlatSample s;
  s.r2 = {0.0, 0.0, -kG};
  try {
    flat_to_state_input(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularThrust);
  }
  s.r2 = {0.0, 5.0, -kG};
  try {
    flat_to_state_input(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularAttitude);
  }
  try {
    attitude_from_virtual({0.0, 0.0, -kG - 0.1}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvertedFlight);
  }
  EXPECT_THROW(Gravity(-1.0), Error);
}

TEST(Flatness, ReducedInputRoundTrip) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> ang(-1.3, 1.3);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> thr(0.05, 3.0 * kG);
  for (int i = 0; i < 2000; ++i) {
    const ReducedInput v{thr(rng), ang(rng), ang(rng), yaw(rng)};
    const ReducedInput w = attitude_from_virtual(virtual_from_attitude(v), v.psi);
    EXPECT_NEAR(w.thrust, v.thrust, 1e-9 * v.thrust);
    EXPECT_NEAR(w.phi, v.phi, 1e-9);
    EXPECT_NEAR(w.theta, v.theta, 1e-9);
  }
}

TEST(Flatness, TiltConeBoundaryMapsToBoundAngle) {
  const double eps = 0.4;
  for (double dir = 0.0; dir < 2.0 * std::numbers::pi; dir += 0.3) {
    // Horizontal magnitude tan(eps) (a_z + g) sits on the cone boundary.
    const double az = 1.3;
    const double rho = std::tan(eps) * (az + kG);
    const Eigen::Vector3d a(rho * std::cos(dir), rho * std::sin(dir), az);
    EXPECT_NEAR(tilt_cone_margin(a, eps, 0.0), 0.0, 1e-12);
    const ReducedInput v = attitude_from_virtual(a, dir);
    EXPECT_NEAR(std::abs(v.theta), eps, 1e-12);
    EXPECT_NEAR(v.phi, 0.0, 1e-12);
  }
  EXPECT_NEAR(tilt_cone_margin({0.0, 0.0, 0.0}, eps, 0.5), kG - 0.5, 1e-14);
}

}  // namespace
}  // namespace safeflight
