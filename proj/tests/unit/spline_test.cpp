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
#include <random>

#include <gtest/gtest.h>

#include "safeflight/error.hpp"
#include "safeflight/spline.hpp"

namespace safeflight {
namespace {

SplineCurve random_curve(std::mt19937& rng, int n, int degree, double tf) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd p(3, n + 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
  return SplineCurve(make_clamped_uniform_knots(0.0, tf, n, degree), p);
}

TEST(KnotVector, ClampedUniformLayout) {
  const KnotVector k = make_clamped_uniform_knots(0.0, 9.0, 45, 5);
  EXPECT_EQ(k.size(), 52);
  EXPECT_EQ(k.last_index(), 45);
  EXPECT_TRUE(k.is_clamped());
  EXPECT_TRUE(k.is_uniform());
  EXPECT_NEAR(k[18], 13.0 * 9.0 / 41.0, 1e-12);
  EXPECT_NEAR(k[33], 28.0 * 9.0 / 41.0, 1e-12);
  // The 3 s and 6 s window edges fall in spans 18 and 32.
  EXPECT_EQ(k.span_index(3.0), 18);
  EXPECT_EQ(k.span_index(6.0), 32);
  EXPECT_EQ(k.first_span(), 5);
  EXPECT_EQ(k.last_span(), 45);
  EXPECT_EQ(k.span_index(9.0), 45);
  EXPECT_EQ(k.span_index(0.0), 5);
}

TEST(KnotVector, RejectsBadInput) {
  EXPECT_THROW(KnotVector({0.0, 1.0, 0.5, 2.0}, 1), Error);
  EXPECT_THROW(make_clamped_uniform_knots(1.0, 1.0, 10, 5), Error);
  EXPECT_THROW(make_clamped_uniform_knots(0.0, 1.0, 3, 5), Error);
  const KnotVector k = make_clamped_uniform_knots(0.0, 1.0, 10, 3);
  try {
    k.span_index(1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

TEST(Basis, PartitionOfUnityAndNonnegative) {
  const KnotVector k = make_clamped_uniform_knots(-1.0, 3.0, 12, 5);
  for (int p = 0; p <= 5; ++p) {
    for (double t = -1.0; t <= 3.0; t += 0.0371) {
      const Eigen::VectorXd lam = basis_eval(k, p, t);
      EXPECT_NEAR(lam.sum(), 1.0, 1e-13);
      EXPECT_GE(lam.minCoeff(), 0.0);
    }
    EXPECT_NEAR(basis_eval(k, p, 3.0).sum(), 1.0, 1e-13);
  }
}

TEST(Basis, ClampedEndpointsInterpolate) {
  std::mt19937 rng(3);
  const SplineCurve c = random_curve(rng, 10, 5, 2.0);
  EXPECT_LT((curve_eval(c, 0, 0.0) - c.control_points().col(0)).norm(), 1e-13);
  EXPECT_LT((curve_eval(c, 0, 2.0) - c.control_points().col(10)).norm(), 1e-13);
}

TEST(DerivativeMatrix, ShapeIdentityAndBoundaryColumns) {
  const KnotVector k = make_clamped_uniform_knots(0.0, 4.0, 10, 5);
  const Eigen::MatrixXd b0 = build_derivative_matrix(k, 0).matrix;
  EXPECT_TRUE(b0.isIdentity(0.0));
  for (int r = 1; r <= 5; ++r) {
    const Eigen::MatrixXd b = build_derivative_matrix(k, r).matrix;
    ASSERT_EQ(b.rows(), 11);
    ASSERT_EQ(b.cols(), 11 + r);
    EXPECT_EQ(b.leftCols(r).norm(), 0.0);
    EXPECT_EQ(b.rightCols(r).norm(), 0.0);
    // Derivatives of a constant curve vanish.
    EXPECT_LT((Eigen::RowVectorXd::Ones(11) * b).norm(), 1e-10);
  }
  EXPECT_THROW(build_derivative_matrix(k, 6), Error);
}

TEST(DerivativeMatrix, MatchesCentralDifferences) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ut(0.05, 3.95);
  const SplineCurve c = random_curve(rng, 20, 5, 4.0);
  const double h = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const double t = ut(rng);
    for (int r = 1; r <= 3; ++r) {
      const Eigen::VectorXd fd = (curve_eval(c, r - 1, t + h) - curve_eval(c, r - 1, t - h)) / (2.0 * h);
      EXPECT_LT((curve_eval(c, r, t) - fd).lpNorm<Eigen::Infinity>(), 1e-5 * (1.0 + fd.norm()));
    }
  }
}

TEST(DerivativeMatrix, NonUniformKnots) {
  const KnotVector k({0, 0, 0, 0, 0.3, 1.1, 1.2, 2.0, 2.0, 2.0, 2.0}, 3);
  Eigen::MatrixXd p(1, 7);
  p << 0.5, -1.0, 2.0, 0.25, 1.5, -0.5, 1.0;
  const SplineCurve c(k, p);
  const double h = 1e-5;
  for (double t = 0.05; t < 1.95; t += 0.1) {
    const double fd = (curve_eval(c, 0, t + h)[0] - curve_eval(c, 0, t - h)[0]) / (2.0 * h);
    EXPECT_NEAR(curve_eval(c, 1, t)[0], fd, 1e-6);
  }
}

TEST(SnapGram, MatchesTrapezoidIntegration) {
  std::mt19937 rng(5);
  const SplineCurve c = random_curve(rng, 12, 5, 3.0);
  const SnapGram sg = snap_gram(c.knots());
  EXPECT_LT((sg.factor.transpose() * sg.factor - sg.gram).norm(), 1e-9 * sg.gram.norm());
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::VectorXd x = c.control_points().row(axis).transpose();
    const double quad = x.dot(sg.gram * x);
    double trap = 0.0;
    const int m = 200000;
    for (int i = 0; i <= m; ++i) {
      const double t = 3.0 * i / m;
      const double s = curve_eval(c, 4, t)[axis];
      trap += (i == 0 || i == m ? 0.5 : 1.0) * s * s;
    }
    trap *= 3.0 / m;
    EXPECT_NEAR(quad, trap, 1e-6 * trap);
  }
}

TEST(SnapGram, FactorRowsAreLocalToTheirSpan) {
  const KnotVector k = make_clamped_uniform_knots(0.0, 1.0, 15, 5);
  const SnapGram sg = snap_gram(k);
  ASSERT_GT(sg.rows_per_span, 0);
  const int spans = k.last_span() - k.first_span() + 1;
  ASSERT_EQ(sg.factor.rows(), spans * sg.rows_per_span);
  for (int s = 0; s < spans; ++s) {
    const int span = k.first_span() + s;
    for (int row = 0; row < sg.rows_per_span; ++row) {
      const Eigen::RowVectorXd f = sg.factor.row(s * sg.rows_per_span + row);
      for (int j = 0; j < f.size(); ++j) {
        if (j < span - 5 || j > span) {
          EXPECT_EQ(f[j], 0.0);
        }
      }
    }
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n = 1; n <= 6; ++n) {
    Eigen::VectorXd x;
    Eigen::VectorXd w;
    gauss_legendre(n, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += w[i] * std::pow(x[i], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(q, exact, 1e-13);
    }
  }
}

}  // namespace
}  // namespace safeflight
