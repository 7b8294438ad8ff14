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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "safeflight/error.hpp"
#include "safeflight/tracker.hpp"

namespace safeflight {
namespace {

// Generic QP oracle: the minimizer of ||mu - m||^2 over {phi1 . mu + phi2 <= 0}
// is the projection onto the affine hull of some subset of active faces.
// Enumerates every subset of at most three faces and keeps the best feasible
// projection.
Eigen::Vector3d qp_oracle(const Eigen::Vector3d& m, const FaceSet& faces) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector3d arg = Eigen::Vector3d::Constant(std::nan(""));
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<int> act;
    for (int k = 0; k < 6; ++k) {
      if (mask & (1 << k)) act.push_back(k);
    }
    if (act.size() > 3) continue;
    Eigen::Vector3d x = m;
    if (!act.empty()) {
      Eigen::MatrixXd a(act.size(), 3);
      Eigen::VectorXd b(act.size());
      for (std::size_t i = 0; i < act.size(); ++i) {
        a.row(static_cast<Eigen::Index>(i)) = faces[static_cast<std::size_t>(act[i])].phi1.transpose();
        b[static_cast<Eigen::Index>(i)] = -faces[static_cast<std::size_t>(act[i])].phi2;
      }
      const Eigen::MatrixXd gram = a * a.transpose();
      if (std::abs(gram.determinant()) < 1e-12) continue;
      x = m - a.transpose() * gram.ldlt().solve(a * m - b);
    }
    bool feasible = true;
    for (const auto& f : faces) feasible = feasible && f.phi1.dot(x) + f.phi2 <= 1e-12;
    if (feasible && (x - m).squaredNorm() < best) {
      best = (x - m).squaredNorm();
      arg = x;
    }
  }
  return arg;
}

struct RandomInstance {
  TrackState state;
  ReferencePoint ref;
  Eigen::Vector3d nominal;
};

RandomInstance random_instance(std::mt19937& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  RandomInstance out;
  for (int q = 0; q < 3; ++q) {
    out.ref.r[q] = u(rng);
    out.ref.r1[q] = u(rng);
    out.ref.r2[q] = u(rng);
    out.state.r[q] = out.ref.r[q] + 0.1 * u(rng);
    out.state.r1[q] = out.ref.r1[q] + u(rng);
    out.nominal[q] = 5.0 * u(rng);
  }
  return out;
}

TEST(Cbf, ParamsValidateAndFactor) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  EXPECT_DOUBLE_EQ(p.lambda1, 4.0);
  EXPECT_DOUBLE_EQ(p.lambda2, 2.0);
  EXPECT_NEAR(p.velocity_bound(), 0.8 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.input_deviation_bound(), 3.2);
  EXPECT_THROW(make_cbf_params(0.1, 2.0, 8.0), Error);
  EXPECT_THROW(make_cbf_params(0.0, 6.0, 8.0), Error);
}

TEST(Cbf, FilterMatchesGenericQp) {
  std::mt19937 rng(21);
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const RandomInstance in = random_instance(rng, 1.0);
    const FaceSet faces = cbf_faces(in.state, in.ref, p);
    const Eigen::Vector3d mu = filter(in.nominal, faces);
    const Eigen::Vector3d oracle = qp_oracle(in.nominal, faces);
    ASSERT_TRUE(oracle.allFinite());
    EXPECT_LT((mu - oracle).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(Cbf, AdmissibleIntervalHasConstantWidth) {
  std::mt19937 rng(22);
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const RandomInstance in = random_instance(rng, 50.0);
    const FaceSet f = cbf_faces(in.state, in.ref, p);
    for (int q = 0; q < 3; ++q) {
      const double width = -f[static_cast<std::size_t>(2 * q)].phi2 - f[static_cast<std::size_t>(2 * q + 1)].phi2;
      EXPECT_NEAR(width, 1.6, 1e-12 * (1.0 + std::abs(f[static_cast<std::size_t>(2 * q)].phi2)));
    }
  }
}

TEST(Cbf, FilterLeavesAdmissibleNominalAlone) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  TrackState s;
  ReferencePoint ref;
  const FaceSet f = cbf_faces(s, ref, p);
  const Eigen::Vector3d m(0.1, -0.2, 0.3);
  EXPECT_EQ(filter(m, f), m);
  EXPECT_EQ(active_faces(m, f), 0);
  const Eigen::Vector3d big(10.0, 0.0, -10.0);
  const Eigen::Vector3d mu = filter(big, f);
  EXPECT_DOUBLE_EQ(mu.x(), 0.8);
  EXPECT_DOUBLE_EQ(mu.z(), -0.8);
  EXPECT_EQ(active_faces(mu, f), 0b100001);
}

TEST(Cbf, BarrierValuesMeasureTubeDistance) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  TrackState s;
  s.r = {0.03, -0.05, 0.0};
  ReferencePoint ref;
  const BarrierValues h = barrier_values(s, ref, p);
  EXPECT_NEAR(h[0], 0.07, 1e-15);
  EXPECT_NEAR(h[1], 0.13, 1e-15);
  EXPECT_NEAR(h[2], 0.15, 1e-15);
  EXPECT_NEAR(h[3], 0.05, 1e-15);
}

TEST(Cbf, InitialConditionChecks) {
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  ReferencePoint ref;
  TrackState s;
  EXPECT_TRUE(check_initial_conditions(s, ref, p).ok());
  s.r.x() = 0.2;
  EXPECT_FALSE(check_initial_conditions(s, ref, p).tube);
  s.r.x() = 0.09;
  s.r1.x() = 2.0;
  const InitialConditionReport r = check_initial_conditions(s, ref, p);
  EXPECT_TRUE(r.tube);
  EXPECT_FALSE(r.barrier_rate);
  EXPECT_FALSE(r.velocity);
}

TEST(Cbf, SafeStepRealizesFilteredInput) {
  std::mt19937 rng(23);
  const CbfParams p = make_cbf_params(0.1, 6.0, 8.0);
  int inside = 0;
  for (int i = 0; i < 2000; ++i) {
    const RandomInstance in = random_instance(rng, 1.0);
    const SafeCommand c = safe_step(in.state, in.ref, in.nominal, p);
    EXPECT_LT((virtual_from_attitude(c.v_s) - c.mu_star).norm(), 1e-10);
    // The filtered input lies in [-a2 (delta + e) - a1 e', a2 (delta - e) - a1 e'],
    // so the deviation bound needs both the tube and the velocity bound.
    const InitialConditionReport ic = check_initial_conditions(in.state, in.ref, p);
    if (ic.tube && ic.velocity) {
      ++inside;
      EXPECT_LE((c.mu_star - in.ref.r2).lpNorm<Eigen::Infinity>(), 4.0 * p.delta * p.a2 + 1e-12);
    }
  }
  EXPECT_GT(inside, 10);
}

TEST(Cbf, NominalPdDrivesTowardReference) {
  TrackState s;
  s.r = {0.5, 0.0, 0.0};
  ReferencePoint ref;
  const Eigen::Vector3d mu = nominal_virtual_input(s, ref, PdGains{});
  EXPECT_NEAR(mu.x(), -3.0, 1e-15);
  const ReducedInput v = nominal_pd(s, ref, PdGains{});
  EXPECT_LT((virtual_from_attitude(v) - mu).norm(), 1e-12);
}

}  // namespace
}  // namespace safeflight
