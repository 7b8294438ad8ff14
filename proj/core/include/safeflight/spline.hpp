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

#include <vector>

#include <Eigen/Dense>

namespace safeflight {

// Nondecreasing knot sequence tau_0..tau_v of a degree-d B-spline with
// N+1 control points, v = N + d + 1.
//
// Construction validates ordering and the v = N + d + 1 relation. Use
// make_clamped_uniform_knots() for the clamped uniform family every planner
// in this library works with.
class KnotVector {
 public:
  KnotVector(std::vector<double> tau, int degree);

  const std::vector<double>& values() const { return tau_; }
  double operator[](int i) const { return tau_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(tau_.size()); }

  int degree() const { return degree_; }
  // Index N of the last control point.
  int last_index() const { return size() - degree_ - 2; }
  int control_count() const { return last_index() + 1; }

  double start() const { return tau_.front(); }
  double end() const { return tau_.back(); }
  bool contains(double t) const { return t >= start() && t <= end(); }

  bool is_clamped() const;
  bool is_uniform(double rel_tol = 1e-12) const;

  // Index i with tau_i <= t < tau_{i+1} and tau_i < tau_{i+1}. The final
  // nonempty span is treated as closed, so t == end() maps to it.
  int span_index(double t) const;

  // First and last index i of nonempty spans [tau_i, tau_{i+1}); for a
  // clamped vector these are d and N.
  int first_span() const;
  int last_span() const;

 private:
  std::vector<double> tau_;
  int degree_;
};

KnotVector make_clamped_uniform_knots(double t0, double tf, int n, int degree);

// All basis functions lambda_{i,degree}(t), i = 0..(v - degree - 1), over the
// knot sequence (Cox-de Boor; 0/0 terms are 0). Right endpoint follows the
// closed-final-span convention of KnotVector::span_index.
Eigen::VectorXd basis_eval(const KnotVector& knots, int degree, double t);

// B_r = M_{d,d-r} C_r, shape (N+1) x (N+r+1). Maps control points to the
// r-th order virtual control points: P^(r) = P B_r.
struct DerivativeMatrix {
  int order = 0;
  Eigen::MatrixXd matrix;
};

DerivativeMatrix build_derivative_matrix(const KnotVector& knots, int r);

struct VirtualControlPoints {
  int order = 0;
  Eigen::MatrixXd points;  // m x (N + r + 1)
};

// B-spline curve s(t) = P Lambda_d(t) in R^m. Caches P^(r) for r = 0..d so
// repeated evaluation does not rebuild B_r.
class SplineCurve {
 public:
  SplineCurve(KnotVector knots, Eigen::MatrixXd control_points);

  const KnotVector& knots() const { return knots_; }
  const Eigen::MatrixXd& control_points() const { return points_; }
  int dimension() const { return static_cast<int>(points_.rows()); }
  int degree() const { return knots_.degree(); }

  // P^(r), r in [0, d].
  const Eigen::MatrixXd& virtual_points(int r) const;

 private:
  KnotVector knots_;
  Eigen::MatrixXd points_;
  std::vector<Eigen::MatrixXd> vcps_;
};

// s^(r)(t) = P B_r Lambda_{d-r}(t).
Eigen::VectorXd curve_eval(const SplineCurve& curve, int r, double t);

VirtualControlPoints compute_vcps(const SplineCurve& curve, int r);

// Quadratic form of the integrated squared fourth derivative over control
// point coefficients of one axis: x' Q x = int (x-curve'''')^2 dt.
// factor satisfies factor' factor = Q and is grouped by span: rows
// [k * rows_per_span, (k + 1) * rows_per_span) only touch the d + 1 control
// points active on the k-th nonempty span.
struct SnapGram {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd factor;
  int rows_per_span = 0;
};

SnapGram snap_gram(const KnotVector& knots);

// n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace safeflight
