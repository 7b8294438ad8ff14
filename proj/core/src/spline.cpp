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

#include "safeflight/spline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "safeflight/error.hpp"

namespace safeflight {
namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace

KnotVector::KnotVector(std::vector<double> tau, int degree)
    : tau_(std::move(tau)), degree_(degree) {
  require(degree_ >= 0, ErrorCode::kInvalidArgument, "knot degree must be >= 0");
  require(static_cast<int>(tau_.size()) >= 2 * degree_ + 2,
          ErrorCode::kInvalidArgument,
          "knot vector needs at least 2(d+1) entries");
  for (std::size_t i = 0; i + 1 < tau_.size(); ++i) {
    require(std::isfinite(tau_[i]) && tau_[i] <= tau_[i + 1],
            ErrorCode::kInvalidArgument, "knot vector must be nondecreasing");
  }
  require(tau_.back() > tau_.front(), ErrorCode::kInvalidArgument,
          "knot vector must span a nonempty interval");
}

bool KnotVector::is_clamped() const {
  const int v = size() - 1;
  for (int i = 1; i <= degree_; ++i) {
    if ((*this)[i] != (*this)[0] || (*this)[v - i] != (*this)[v]) return false;
  }
  return true;
}

bool KnotVector::is_uniform(double rel_tol) const {
  const int n = last_index();
  const double h = (*this)[degree_ + 1] - (*this)[degree_];
  for (int i = degree_; i <= n; ++i) {
    const double step = (*this)[i + 1] - (*this)[i];
    if (std::abs(step - h) > rel_tol * std::max(1.0, std::abs(h))) return false;
  }
  return true;
}

int KnotVector::first_span() const {
  for (int i = 0; i + 1 < size(); ++i) {
    if ((*this)[i] < (*this)[i + 1]) return i;
  }
  return 0;
}

int KnotVector::last_span() const {
  for (int i = size() - 2; i >= 0; --i) {
    if ((*this)[i] < (*this)[i + 1]) return i;
  }
  return 0;
}

int KnotVector::span_index(double t) const {
  if (!contains(t)) {
    throw Error(ErrorCode::kOutOfRange,
                "time " + std::to_string(t) + " outside knot range [" +
                    std::to_string(start()) + ", " + std::to_string(end()) + "]");
  }
  if (t >= end()) return last_span();
  // Largest i with tau_i <= t; the upper_bound lands past repeated knots.
  const auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
  return static_cast<int>(it - tau_.begin()) - 1;
}

KnotVector make_clamped_uniform_knots(double t0, double tf, int n, int degree) {
  require(tf > t0, ErrorCode::kInvalidArgument, "knot range requires tf > t0");
  require(degree >= 1, ErrorCode::kInvalidArgument, "degree must be >= 1");
  require(n >= degree, ErrorCode::kInvalidArgument, "N must be >= d");
  const int v = n + degree + 1;
  const int spans = n - degree + 1;
  std::vector<double> tau(static_cast<std::size_t>(v + 1));
  for (int i = 0; i <= v; ++i) {
    if (i <= degree) {
      tau[i] = t0;
    } else if (i >= v - degree) {
      tau[i] = tf;
    } else {
      tau[i] = t0 + (tf - t0) * static_cast<double>(i - degree) / spans;
    }
  }
  return KnotVector(std::move(tau), degree);
}

Eigen::VectorXd basis_eval(const KnotVector& knots, int degree, double t) {
  require(degree >= 0 && degree <= knots.degree(), ErrorCode::kOutOfRange,
          "basis degree must lie in [0, d]");
  const int span = knots.span_index(t);
  const int v = knots.size() - 1;

  // Degree-0 indicators over all v spans, then raise the degree in place.
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(v);
  lam[span] = 1.0;
  for (int p = 1; p <= degree; ++p) {
    const int count = v - p;
    Eigen::VectorXd next(count);
    for (int i = 0; i < count; ++i) {
      double value = 0.0;
      const double left_den = knots[i + p] - knots[i];
      if (left_den > 0.0) value += (t - knots[i]) / left_den * lam[i];
      const double right_den = knots[i + p + 1] - knots[i + 1];
      if (right_den > 0.0) {
        value += (knots[i + p + 1] - t) / right_den * lam[i + 1];
      }
      next[i] = value;
    }
    lam = std::move(next);
  }
  return lam;
}

DerivativeMatrix build_derivative_matrix(const KnotVector& knots, int r) {
  const int d = knots.degree();
  const int n = knots.last_index();
  require(r >= 0 && r <= d, ErrorCode::kOutOfRange,
          "derivative order must lie in [0, d]");

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
  for (int i = 1; i <= r; ++i) {
    // f_M(tau, d, N, i): (N-i+2) x (N-i+1) lower bidiagonal difference.
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n - i + 2, n - i + 1);
    for (int k = 0; k <= n - i; ++k) {
      const double a = (d - i + 1) / (knots[k + d + 1] - knots[k + i]);
      f(k, k) = -a;
      f(k + 1, k) = a;
    }
    m = m * f;
  }

  DerivativeMatrix out;
  out.order = r;
  out.matrix = Eigen::MatrixXd::Zero(n + 1, n + r + 1);
  // C_r pads r zero columns on each side.
  out.matrix.middleCols(r, n - r + 1) = m;
  return out;
}

SplineCurve::SplineCurve(KnotVector knots, Eigen::MatrixXd control_points)
    : knots_(std::move(knots)), points_(std::move(control_points)) {
  require(points_.cols() == knots_.control_count(),
          ErrorCode::kDimensionMismatch,
          "control point count must equal N + 1");
  vcps_.reserve(static_cast<std::size_t>(knots_.degree()) + 1);
  for (int r = 0; r <= knots_.degree(); ++r) {
    vcps_.push_back(points_ * build_derivative_matrix(knots_, r).matrix);
  }
}

const Eigen::MatrixXd& SplineCurve::virtual_points(int r) const {
  require(r >= 0 && r <= degree(), ErrorCode::kOutOfRange,
          "derivative order must lie in [0, d]");
  return vcps_[static_cast<std::size_t>(r)];
}

Eigen::VectorXd curve_eval(const SplineCurve& curve, int r, double t) {
  const Eigen::MatrixXd& vcp = curve.virtual_points(r);
  return vcp * basis_eval(curve.knots(), curve.degree() - r, t);
}

VirtualControlPoints compute_vcps(const SplineCurve& curve, int r) {
  return {r, curve.virtual_points(r)};
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  require(n >= 1, ErrorCode::kInvalidArgument, "quadrature needs >= 1 point");
  nodes.resize(n);
  weights.resize(n);
  // Returns (P_n(x), P_n'(x)).
  const auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

SnapGram snap_gram(const KnotVector& knots) {
  const int d = knots.degree();
  require(d >= 4, ErrorCode::kInvalidArgument, "snap objective requires d >= 4");
  const int n = knots.last_index();
  const Eigen::MatrixXd b4 = build_derivative_matrix(knots, 4).matrix;

  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  gauss_legendre(d - 4 + 1, nodes, weights);

  // The rule is exact for the squared snap polynomial on each span, so the
  // weighted node rows form an exact factor of Q.
  std::vector<Eigen::VectorXd> rows;
  for (int span = knots.first_span(); span <= knots.last_span(); ++span) {
    const double a = knots[span];
    const double b = knots[span + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a);
    for (int k = 0; k < nodes.size(); ++k) {
      const double t = a + half * (nodes[k] + 1.0);
      rows.push_back(std::sqrt(half * weights[k]) * (b4 * basis_eval(knots, d - 4, t)));
    }
  }
  Eigen::MatrixXd factor(static_cast<Eigen::Index>(rows.size()), n + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) factor.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  Eigen::MatrixXd q = factor.transpose() * factor;
  q = 0.5 * (q + q.transpose());
  return {std::move(q), std::move(factor), static_cast<int>(nodes.size())};
}

}  // namespace safeflight
