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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "safeflight/spline.hpp"
#include "safeflight/tracker.hpp"

namespace safeflight {

using ReferenceSampler = std::function<ReferencePoint(double t)>;

// Samples r, r', r'' of a planned curve. Times past the end hold the final
// point with zero velocity and acceleration.
ReferenceSampler curve_reference(const SplineCurve& curve);

struct TickCommand {
  Eigen::Vector3d mu_nominal = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();
  ReducedInput input;
  BarrierValues barrier{};
  std::uint8_t active = 0;
};

using Controller = std::function<TickCommand(double t, const TrackState&, const ReferencePoint&)>;

// PD nominal, optionally passed through the CBF filter; psi = 0.
Controller tracking_controller(const CbfParams& params, const PdGains& gains, bool filtered,
                               Gravity g = Gravity());

struct SimConfig {
  double control_rate_hz = 100.0;
  int substeps = 10;
  double duration = 1.0;
  // Defaults to the reference state at t = 0 offset by nothing.
  std::optional<TrackState> initial_state;
  double start_time = 0.0;

  double step() const { return 1.0 / (control_rate_hz * substeps); }
};

struct SimRecord {
  double t = 0.0;
  TrackState state;
  ReferencePoint ref;
  TickCommand command;
};

struct SimTrace {
  std::vector<SimRecord> records;
  // Worst tube and velocity deviation over every integration substep.
  double max_position_error = 0.0;
  double max_velocity_error = 0.0;
};

// One classical RK4 step of r'' = mu with mu held constant.
TrackState rk4_step(const TrackState& z, const Eigen::Vector3d& mu, double h);

// Zero-order-hold closed loop of the double integrator.
SimTrace simulate(const ReferenceSampler& reference, const Controller& controller,
                  const SimConfig& cfg);

struct CertificateReport {
  double max_position_error = 0.0;  // vs delta
  double max_velocity_error = 0.0;  // vs 2 delta a2 / a1
  double max_input_deviation = 0.0;  // ||mu - r''_ref||_inf vs 4 delta a2
  double min_barrier = 0.0;
  double delta = 0.0;
  double velocity_bound = 0.0;
  double input_bound = 0.0;

  // Every bound holds with the given sampled-data slack (the input
  // deviation bound is structural and gets no slack).
  bool holds(double slack) const;
};

CertificateReport certificates(const SimTrace& trace, const CbfParams& params);

}  // namespace safeflight
