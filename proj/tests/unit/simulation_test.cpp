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

#include <gtest/gtest.h>

#include "safeflight/error.hpp"
#include "safeflight/simulation.hpp"

namespace safeflight {
namespace {

ReferenceSampler constant_acceleration(const Eigen::Vector3d& a) {
  return [a](double t) {
    ReferencePoint ref;
    ref.r = 0.5 * a * t * t;
    ref.r1 = a * t;
    ref.r2 = a;
    return ref;
  };
}

ReferenceSampler circle(double radius, double rate) {
  return [radius, rate](double t) {
    ReferencePoint ref;
    const double c = std::cos(rate * t), s = std::sin(rate * t);
    ref.r = {radius * c, radius * s, 1.0};
    ref.r1 = {-radius * rate * s, radius * rate * c, 0.0};
    ref.r2 = {-radius * rate * rate * c, -radius * rate * rate * s, 0.0};
    return ref;
  };
}

TEST(Simulation, Rk4IsExactForConstantInput) {
  TrackState z;
  z.r = {1.0, -2.0, 0.5};
  z.r1 = {0.3, 0.1, -0.7};
  const Eigen::Vector3d mu(0.4, -1.1, 2.0);
  const double h = 0.37;
  const TrackState n = rk4_step(z, mu, h);
  EXPECT_LT((n.r - (z.r + h * z.r1 + 0.5 * h * h * mu)).norm(), 1e-15);
  EXPECT_LT((n.r1 - (z.r1 + h * mu)).norm(), 1e-15);
}

TEST(Simulation, FeedforwardTracksConstantAccelerationExactly) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  SimConfig cfg;
  cfg.duration = 3.0;
  const SimTrace tr = simulate(constant_acceleration({0.5, -0.2, 0.1}),
                               tracking_controller(p, PdGains{}, true), cfg);
  EXPECT_EQ(tr.records.size(), 301u);
  EXPECT_LT(tr.max_position_error, 1e-12);
  EXPECT_LT(tr.max_velocity_error, 1e-12);
  EXPECT_NEAR(tr.records.back().t, 3.0, 1e-12);
}

TEST(Simulation, FilterKeepsDetunedNominalInsideTube) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  SimConfig cfg;
  cfg.duration = 10.0;
  const ReferenceSampler ref = circle(1.0, 1.5);
  const SimTrace filtered = simulate(ref, tracking_controller(p, PdGains::detuned(), true), cfg);
  const CertificateReport cf = certificates(filtered, p);
  EXPECT_TRUE(cf.holds(0.01));
  EXPECT_LE(cf.max_input_deviation, 3.2);

  const SimTrace open = simulate(ref, tracking_controller(p, PdGains::detuned(), false), cfg);
  const CertificateReport co = certificates(open, p);
  EXPECT_FALSE(co.holds(0.01));
  EXPECT_LT(co.min_barrier, -0.01);
}

TEST(Simulation, InitialOffsetInsideTubeStaysInside) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  SimConfig cfg;
  cfg.duration = 5.0;
  TrackState z0;
  z0.r = {1.08, 0.0, 0.93};
  z0.r1 = {0.0, 1.5, 0.0};
  cfg.initial_state = z0;
  const SimTrace tr = simulate(circle(1.0, 1.5), tracking_controller(p, PdGains::detuned(), true), cfg);
  EXPECT_LE(tr.max_position_error, 0.1 + 0.01);
}

TEST(Simulation, HoldsAfterReferenceEnds) {
  const SplineCurve c(make_clamped_uniform_knots(0.0, 1.0, 5, 5), Eigen::MatrixXd::Ones(3, 6));
  const ReferencePoint ref = curve_reference(c)(2.0);
  EXPECT_LT((ref.r - Eigen::Vector3d::Ones()).norm(), 1e-14);
  EXPECT_EQ(ref.r1.norm(), 0.0);
  EXPECT_EQ(ref.r2.norm(), 0.0);
}

TEST(Simulation, RejectsBadConfig) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  SimConfig cfg;
  cfg.substeps = 0;
  EXPECT_THROW(simulate(circle(1.0, 1.0), tracking_controller(p, PdGains{}, true), cfg), Error);
}

TEST(Simulation, CertificateSlackAppliesToTubeOnly) {
  CertificateReport r;
  r.delta = 0.1;
  r.velocity_bound = 0.2;
  r.input_bound = 3.2;
  r.max_position_error = 0.105;
  r.min_barrier = -0.005;
  EXPECT_TRUE(r.holds(0.01));
  EXPECT_FALSE(r.holds(0.0));
  r.max_input_deviation = 3.2 + 1e-9;
  EXPECT_FALSE(r.holds(0.01));
}

}  // namespace
}  // namespace safeflight
