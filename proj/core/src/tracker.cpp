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

#include "safeflight/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "safeflight/error.hpp"

namespace safeflight {

CbfParams make_cbf_params(double delta, double a1, double a2) {
  if (!(delta > 0.0) || !(a1 > 0.0) || !(a2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cbf parameters delta, a1, a2 must be positive");
  }
  const double disc = a1 * a1 - 4.0 * a2;
  if (disc < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "cbf roots are complex: need a1^2 >= 4 a2");
  }
  CbfParams p;
  p.delta = delta;
  p.a1 = a1;
  p.a2 = a2;
  // Larger root via the stable form, smaller from the product.
  p.lambda1 = 0.5 * (a1 + std::sqrt(disc));
  p.lambda2 = a2 / p.lambda1;
  return p;
}

FaceSet cbf_faces(const TrackState& state, const ReferencePoint& ref, const CbfParams& params) {
  FaceSet faces;
  for (int q = 0; q < 3; ++q) {
    const double e = state.r[q] - ref.r[q];
    const double de = state.r1[q] - ref.r1[q];
    CbfFace& up = faces[static_cast<std::size_t>(2 * q)];
    up.axis = q;
    up.side = FaceSide::kUpper;
    up.phi1 = Eigen::Vector3d::Unit(q);
    up.phi2 = -ref.r2[q] + params.a1 * de + params.a2 * (e - params.delta);
    CbfFace& lo = faces[static_cast<std::size_t>(2 * q + 1)];
    lo.axis = q;
    lo.side = FaceSide::kLower;
    lo.phi1 = -Eigen::Vector3d::Unit(q);
    lo.phi2 = ref.r2[q] - params.a1 * de + params.a2 * (-e - params.delta);
  }
  return faces;
}

BarrierValues barrier_values(const TrackState& state, const ReferencePoint& ref,
                             const CbfParams& params) {
  BarrierValues h{};
  for (int q = 0; q < 3; ++q) {
    const double e = state.r[q] - ref.r[q];
    h[static_cast<std::size_t>(2 * q)] = params.delta - e;
    h[static_cast<std::size_t>(2 * q + 1)] = params.delta + e;
  }
  return h;
}

Eigen::Vector3d filter(const Eigen::Vector3d& mu_nominal, const FaceSet& faces) {
  Eigen::Vector3d mu;
  for (int q = 0; q < 3; ++q) {
    const double hi = -faces[static_cast<std::size_t>(2 * q)].phi2;
    const double lo = faces[static_cast<std::size_t>(2 * q + 1)].phi2;
    mu[q] = std::clamp(mu_nominal[q], lo, hi);
  }
  return mu;
}

std::uint8_t active_faces(const Eigen::Vector3d& mu, const FaceSet& faces, double tol) {
  std::uint8_t bits = 0;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const double value = faces[k].phi1.dot(mu) + faces[k].phi2;
    if (value >= -tol * (1.0 + std::abs(faces[k].phi2))) bits |= static_cast<std::uint8_t>(1u << k);
  }
  return bits;
}

InitialConditionReport check_initial_conditions(const TrackState& state,
                                                const ReferencePoint& ref,
                                                const CbfParams& params) {
  const Eigen::Vector3d e = state.r - ref.r;
  const Eigen::Vector3d de = state.r1 - ref.r1;
  InitialConditionReport rep;
  rep.position_error = e.lpNorm<Eigen::Infinity>();
  rep.velocity_error = de.lpNorm<Eigen::Infinity>();
  rep.tube = rep.position_error <= params.delta;
  for (double lambda : {params.lambda1, params.lambda2}) {
    if ((de + lambda * e).lpNorm<Eigen::Infinity>() <= lambda * params.delta) {
      rep.barrier_rate = true;
    }
  }
  rep.velocity = rep.velocity_error <= params.velocity_bound();
  return rep;
}

Eigen::Vector3d nominal_virtual_input(const TrackState& state, const ReferencePoint& ref,
                                      const PdGains& gains) {
  return gains.feedforward * ref.r2 + gains.kp * (ref.r - state.r) +
         gains.kd * (ref.r1 - state.r1);
}

ReducedInput nominal_pd(const TrackState& state, const ReferencePoint& ref,
                        const PdGains& gains, double psi, Gravity g) {
  return attitude_from_virtual(nominal_virtual_input(state, ref, gains), psi, g);
}

SafeCommand safe_step(const TrackState& state, const ReferencePoint& ref,
                      const Eigen::Vector3d& mu_nominal, const CbfParams& params,
                      double psi, Gravity g) {
  const FaceSet faces = cbf_faces(state, ref, params);
  SafeCommand cmd;
  cmd.mu_star = filter(mu_nominal, faces);
  cmd.v_s = attitude_from_virtual(cmd.mu_star, psi, g);
  cmd.barrier = barrier_values(state, ref, params);
  cmd.active = active_faces(cmd.mu_star, faces);
  return cmd;
}

}  // namespace safeflight
