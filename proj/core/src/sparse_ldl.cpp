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

#include "sparse_ldl.hpp"

#include <cmath>

#include <Eigen/OrderingMethods>

#include "safeflight/error.hpp"

namespace safeflight::detail {

void SparseLdl::permute(const Eigen::SparseMatrix<double>& lower) {
  upper_.resize(n_, n_);
  upper_.selfadjointView<Eigen::Upper>() = lower.selfadjointView<Eigen::Lower>().twistedBy(p_);
  upper_.makeCompressed();
}

void SparseLdl::analyze(const Eigen::SparseMatrix<double>& lower, std::vector<int> signs) {
  n_ = static_cast<int>(lower.rows());
  if (lower.cols() != n_ || static_cast<int>(signs.size()) != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "ldl: matrix and sign vector sizes differ");
  }
  Eigen::AMDOrdering<int> amd;
  const Eigen::SparseMatrix<double> full = lower.selfadjointView<Eigen::Lower>();
  amd(full, pinv_);
  p_ = pinv_.inverse();
  permute(lower);

  signs_.assign(static_cast<std::size_t>(n_), 1);
  for (int i = 0; i < n_; ++i) signs_[static_cast<std::size_t>(p_.indices()[i])] = signs[static_cast<std::size_t>(i)];

  // Elimination tree and column counts of L.
  const int* ap = upper_.outerIndexPtr();
  const int* ai = upper_.innerIndexPtr();
  etree_.assign(static_cast<std::size_t>(n_), -1);
  lnz_.assign(static_cast<std::size_t>(n_), 0);
  std::vector<int> work(static_cast<std::size_t>(n_), -1);
  for (int j = 0; j < n_; ++j) {
    work[static_cast<std::size_t>(j)] = j;
    for (int q = ap[j]; q < ap[j + 1]; ++q) {
      int i = ai[q];
      while (i < j && work[static_cast<std::size_t>(i)] != j) {
        if (etree_[static_cast<std::size_t>(i)] == -1) etree_[static_cast<std::size_t>(i)] = j;
        ++lnz_[static_cast<std::size_t>(i)];
        work[static_cast<std::size_t>(i)] = j;
        i = etree_[static_cast<std::size_t>(i)];
      }
    }
  }
  lp_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int i = 0; i < n_; ++i) lp_[static_cast<std::size_t>(i) + 1] = lp_[static_cast<std::size_t>(i)] + lnz_[static_cast<std::size_t>(i)];
  li_.assign(static_cast<std::size_t>(lp_.back()), 0);
  lx_.assign(static_cast<std::size_t>(lp_.back()), 0.0);
  d_.assign(static_cast<std::size_t>(n_), 0.0);
  dinv_.assign(static_cast<std::size_t>(n_), 0.0);
}

int SparseLdl::factorize(const Eigen::SparseMatrix<double>& lower) {
  permute(lower);
  const int* ap = upper_.outerIndexPtr();
  const int* ai = upper_.innerIndexPtr();
  const double* ax = upper_.valuePtr();
  const auto n = static_cast<std::size_t>(n_);

  std::vector<double> y(n, 0.0);
  std::vector<char> marked(n, 0);
  std::vector<int> pattern, stack;
  std::vector<int> next(lp_.begin(), lp_.end() - 1);
  int regularized = 0;

  for (int k = 0; k < n_; ++k) {
    // Nonzero pattern of row k of L: union of etree paths from the entries
    // of column k of the upper triangle, in topological order.
    pattern.clear();
    double dk = 0.0;
    for (int q = ap[k]; q < ap[k + 1]; ++q) {
      const int i = ai[q];
      if (i == k) {
        dk += ax[q];
        continue;
      }
      y[static_cast<std::size_t>(i)] += ax[q];
      stack.clear();
      for (int j = i; j != -1 && j < k && !marked[static_cast<std::size_t>(j)]; j = etree_[static_cast<std::size_t>(j)]) {
        marked[static_cast<std::size_t>(j)] = 1;
        stack.push_back(j);
      }
      pattern.insert(pattern.end(), stack.rbegin(), stack.rend());
    }
    for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
      const auto c = static_cast<std::size_t>(*it);
      const double yc = y[c];
      const int end = next[c];
      for (int q = lp_[c]; q < end; ++q) y[static_cast<std::size_t>(li_[static_cast<std::size_t>(q)])] -= lx_[static_cast<std::size_t>(q)] * yc;
      const double l = yc * dinv_[c];
      li_[static_cast<std::size_t>(end)] = k;
      lx_[static_cast<std::size_t>(end)] = l;
      dk -= yc * l;
      ++next[c];
      y[c] = 0.0;
      marked[c] = 0;
    }
    // Only vanishing pivots are replaced. A large pivot of the unexpected
    // sign is still an exact elimination step, and overwriting it would
    // destroy the factor.
    if (!(std::abs(dk) > kPivotEpsilon)) {
      dk = signs_[static_cast<std::size_t>(k)] * kPivotDelta;
      ++regularized;
    }
    d_[static_cast<std::size_t>(k)] = dk;
    dinv_[static_cast<std::size_t>(k)] = 1.0 / dk;
  }
  return regularized;
}

Eigen::VectorXd SparseLdl::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = p_ * b;
  for (int i = 0; i < n_; ++i) {
    const double xi = x[i];
    for (int q = lp_[static_cast<std::size_t>(i)]; q < lp_[static_cast<std::size_t>(i) + 1]; ++q) {
      x[li_[static_cast<std::size_t>(q)]] -= lx_[static_cast<std::size_t>(q)] * xi;
    }
  }
  for (int i = 0; i < n_; ++i) x[i] *= dinv_[static_cast<std::size_t>(i)];
  for (int i = n_ - 1; i >= 0; --i) {
    double xi = x[i];
    for (int q = lp_[static_cast<std::size_t>(i)]; q < lp_[static_cast<std::size_t>(i) + 1]; ++q) {
      xi -= lx_[static_cast<std::size_t>(q)] * x[li_[static_cast<std::size_t>(q)]];
    }
    x[i] = xi;
  }
  return pinv_ * x;
}

}  // namespace safeflight::detail
