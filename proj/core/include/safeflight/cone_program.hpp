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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace safeflight {

// Sparse linear form: sum of coef * x[index].
using SparseRow = std::vector<std::pair<int, double>>;

struct AffineForm {
  SparseRow terms;
  double constant = 0.0;
};

// ||(lhs_1(x), ..., lhs_k(x))||_2 <= rhs(x). An empty lhs is a scalar
// inequality rhs(x) >= 0.
struct SocConstraint {
  std::vector<AffineForm> lhs;
  AffineForm rhs;
  std::string block;
};

// row' x == rhs (equality) or row' x <= rhs (inequality).
struct LinearConstraint {
  SparseRow row;
  double rhs = 0.0;
  std::string block;
};

struct BlockCount {
  std::string block;
  int soc = 0;
  int equalities = 0;
  int inequalities = 0;
};

// min f'x subject to SOC, linear-equality and linear-inequality constraints.
// Constraints keep insertion order, so assembling the same program twice
// gives identical solver input.
class ConeProgram {
 public:
  // Appends count variables and returns the index of the first one.
  int add_variables(int count);
  int variable_count() const { return static_cast<int>(objective_.size()); }

  // Adds coef to f[index].
  void add_objective(int index, double coef);
  const std::vector<double>& objective() const { return objective_; }

  // Tags every constraint added afterwards.
  void set_block(std::string name) { block_ = std::move(name); }
  const std::string& block() const { return block_; }

  void add_soc(std::vector<AffineForm> lhs, AffineForm rhs);
  void add_equality(SparseRow row, double rhs);
  void add_inequality(SparseRow row, double rhs);

  const std::vector<SocConstraint>& socs() const { return socs_; }
  const std::vector<LinearConstraint>& equalities() const { return equalities_; }
  const std::vector<LinearConstraint>& inequalities() const { return inequalities_; }

  // Constraint counts per block tag, ordered by first appearance among the
  // SOC, then equality, then inequality constraints.
  std::vector<BlockCount> block_counts() const;

 private:
  void check_row(const SparseRow& row) const;

  std::vector<double> objective_;
  std::vector<SocConstraint> socs_;
  std::vector<LinearConstraint> equalities_;
  std::vector<LinearConstraint> inequalities_;
  std::string block_ = "default";
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* to_string(SolveStatus status);

struct SolveOptions {
  double feasibility_tol = 1e-8;
  double objective_tol = 1e-8;
  int max_iterations = 100;
};

struct Solution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  // Worst violation over all constraints, evaluated directly on x.
  double max_residual = 0.0;
  int iterations = 0;
};

// Primal-dual interior-point method on the homogeneous self-dual embedding
// with Nesterov-Todd scaling and Mehrotra correction. Re-entrant.
Solution solve(const ConeProgram& cp, const SolveOptions& options = {});

double eval(const AffineForm& form, const Eigen::VectorXd& x);
double eval(const SparseRow& row, const Eigen::VectorXd& x);

// Largest violation of any constraint at x (0 when x is feasible).
double max_constraint_residual(const ConeProgram& cp, const Eigen::VectorXd& x);

// Appends s and ||(2 G x_sel, s - 1)|| <= s + 1, i.e. ||G x_sel||^2 <= s.
// Returns the index of s. G must have selector.size() columns.
int add_quadratic_epigraph(ConeProgram& cp, const Eigen::MatrixXd& g,
                           const std::vector<int>& selector);

// Plain-text dump: a header line with dimensions, then the objective, then
// each constraint block as "kind block nnz idx:coef ... | constant".
void write_program_text(const ConeProgram& cp, std::ostream& out);

// Inverse of write_program_text. Throws Error(kParse) on malformed input.
ConeProgram read_program_text(std::istream& in);

}  // namespace safeflight
