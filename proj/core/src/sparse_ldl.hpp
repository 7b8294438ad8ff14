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

#include <Eigen/SparseCore>

namespace safeflight::detail {

// Up-looking sparse LDL' for symmetric quasi-definite matrices with a fixed
// pattern. Numerically zero pivots are replaced by a small value of the
// expected sign.
class SparseLdl {
 public:
  // lower holds the lower triangle (diagonal included, explicit zeros allowed).
  // signs[i] is the expected pivot sign (+1 or -1), used when a vanishing
  // pivot has to be replaced. Rows are reordered by approximate minimum
  // degree.
  void analyze(const Eigen::SparseMatrix<double>& lower, std::vector<int> signs);

  // Returns the number of pivots that had to be regularized.
  int factorize(const Eigen::SparseMatrix<double>& lower);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  static constexpr double kPivotEpsilon = 1e-13;
  static constexpr double kPivotDelta = 2e-7;

 private:
  void permute(const Eigen::SparseMatrix<double>& lower);

  int n_ = 0;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p_, pinv_;
  Eigen::SparseMatrix<double> upper_;
  std::vector<int> signs_;
  std::vector<int> etree_, lnz_, lp_, li_;
  std::vector<double> lx_, d_, dinv_;
};

}  // namespace safeflight::detail
