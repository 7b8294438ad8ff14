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

#include "safeflight/cone_program.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "safeflight/error.hpp"

namespace safeflight {

int ConeProgram::add_variables(int count) {
  if (count < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative variable count");
  }
  const int first = variable_count();
  objective_.resize(objective_.size() + static_cast<std::size_t>(count), 0.0);
  return first;
}

void ConeProgram::add_objective(int index, double coef) {
  check_row({{index, coef}});
  objective_[static_cast<std::size_t>(index)] += coef;
}

void ConeProgram::check_row(const SparseRow& row) const {
  for (const auto& [index, coef] : row) {
    if (index < 0 || index >= variable_count()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "constraint references variable " + std::to_string(index) +
                      " of " + std::to_string(variable_count()));
    }
    if (!std::isfinite(coef)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite coefficient");
    }
  }
}

void ConeProgram::add_soc(std::vector<AffineForm> lhs, AffineForm rhs) {
  for (const auto& f : lhs) check_row(f.terms);
  check_row(rhs.terms);
  socs_.push_back({std::move(lhs), std::move(rhs), block_});
}

void ConeProgram::add_equality(SparseRow row, double rhs) {
  check_row(row);
  equalities_.push_back({std::move(row), rhs, block_});
}

void ConeProgram::add_inequality(SparseRow row, double rhs) {
  check_row(row);
  inequalities_.push_back({std::move(row), rhs, block_});
}

std::vector<BlockCount> ConeProgram::block_counts() const {
  std::vector<BlockCount> counts;
  auto slot = [&](const std::string& name) -> BlockCount& {
    for (auto& c : counts) {
      if (c.block == name) return c;
    }
    counts.push_back({name, 0, 0, 0});
    return counts.back();
  };
  for (const auto& c : socs_) ++slot(c.block).soc;
  for (const auto& c : equalities_) ++slot(c.block).equalities;
  for (const auto& c : inequalities_) ++slot(c.block).inequalities;
  return counts;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double eval(const SparseRow& row, const Eigen::VectorXd& x) {
  double v = 0.0;
  for (const auto& [index, coef] : row) v += coef * x[index];
  return v;
}

double eval(const AffineForm& form, const Eigen::VectorXd& x) {
  return eval(form.terms, x) + form.constant;
}

double max_constraint_residual(const ConeProgram& cp, const Eigen::VectorXd& x) {
  if (x.size() != cp.variable_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "point has wrong dimension");
  }
  double worst = 0.0;
  for (const auto& c : cp.equalities()) {
    worst = std::max(worst, std::abs(eval(c.row, x) - c.rhs));
  }
  for (const auto& c : cp.inequalities()) {
    worst = std::max(worst, eval(c.row, x) - c.rhs);
  }
  for (const auto& c : cp.socs()) {
    double sq = 0.0;
    for (const auto& f : c.lhs) {
      const double v = eval(f, x);
      sq += v * v;
    }
    worst = std::max(worst, std::sqrt(sq) - eval(c.rhs, x));
  }
  return worst;
}

int add_quadratic_epigraph(ConeProgram& cp, const Eigen::MatrixXd& g,
                           const std::vector<int>& selector) {
  if (g.cols() != static_cast<Eigen::Index>(selector.size())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "epigraph factor has " + std::to_string(g.cols()) +
                    " columns for " + std::to_string(selector.size()) +
                    " selected variables");
  }
  const int s = cp.add_variables(1);
  std::vector<AffineForm> lhs;
  lhs.reserve(static_cast<std::size_t>(g.rows()) + 1);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    AffineForm f;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (g(i, j) != 0.0) f.terms.emplace_back(selector[static_cast<std::size_t>(j)], 2.0 * g(i, j));
    }
    lhs.push_back(std::move(f));
  }
  lhs.push_back({{{s, 1.0}}, -1.0});
  cp.add_soc(std::move(lhs), {{{s, 1.0}}, 1.0});
  return s;
}

namespace {

void write_row(std::ostream& out, const SparseRow& row) {
  out << row.size();
  for (const auto& [index, coef] : row) out << ' ' << index << ':' << coef;
}

}  // namespace

void write_program_text(const ConeProgram& cp, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "cone-program variables " << cp.variable_count() << " socs "
      << cp.socs().size() << " equalities " << cp.equalities().size()
      << " inequalities " << cp.inequalities().size() << '\n';
  SparseRow f;
  for (int i = 0; i < cp.variable_count(); ++i) {
    if (cp.objective()[static_cast<std::size_t>(i)] != 0.0) {
      f.emplace_back(i, cp.objective()[static_cast<std::size_t>(i)]);
    }
  }
  out << "objective ";
  write_row(out, f);
  out << '\n';
  for (const auto& c : cp.equalities()) {
    out << "eq " << c.block << ' ';
    write_row(out, c.row);
    out << " | " << c.rhs << '\n';
  }
  for (const auto& c : cp.inequalities()) {
    out << "le " << c.block << ' ';
    write_row(out, c.row);
    out << " | " << c.rhs << '\n';
  }
  for (const auto& c : cp.socs()) {
    out << "soc " << c.block << ' ' << c.lhs.size() << '\n';
    out << "  rhs ";
    write_row(out, c.rhs.terms);
    out << " | " << c.rhs.constant << '\n';
    for (const auto& l : c.lhs) {
      out << "  lhs ";
      write_row(out, l.terms);
      out << " | " << l.constant << '\n';
    }
  }
  out.precision(old_precision);
}

namespace {

[[noreturn]] void bad_program(int line, const std::string& what) {
  throw Error(ErrorCode::kParse, "program line " + std::to_string(line) + ": " + what);
}

// Reads "nnz idx:coef ... | constant" (the constant part only when wanted).
SparseRow read_row(std::istringstream& ls, int line, int n) {
  int nnz = 0;
  if (!(ls >> nnz) || nnz < 0) bad_program(line, "expected a term count");
  SparseRow row;
  for (int k = 0; k < nnz; ++k) {
    std::string term;
    if (!(ls >> term)) bad_program(line, "missing term");
    const auto colon = term.find(':');
    if (colon == std::string::npos) bad_program(line, "malformed term '" + term + "'");
    try {
      const int idx = std::stoi(term.substr(0, colon));
      if (idx < 0 || idx >= n) bad_program(line, "variable index out of range");
      row.emplace_back(idx, std::stod(term.substr(colon + 1)));
    } catch (const std::logic_error&) {
      bad_program(line, "malformed term '" + term + "'");
    }
  }
  return row;
}

double read_constant(std::istringstream& ls, int line) {
  std::string bar;
  double v = 0.0;
  if (!(ls >> bar) || bar != "|" || !(ls >> v)) bad_program(line, "expected '| constant'");
  return v;
}

}  // namespace

ConeProgram read_program_text(std::istream& in) {
  std::string text;
  int line_no = 0;
  auto next_line = [&](std::istringstream& ls) {
    if (!std::getline(in, text)) bad_program(line_no + 1, "unexpected end of input");
    ++line_no;
    ls.clear();
    ls.str(text);
  };
  std::istringstream ls;
  next_line(ls);
  std::string word;
  int n = 0;
  std::size_t socs = 0, eqs = 0, les = 0;
  if (!(ls >> word) || word != "cone-program") bad_program(line_no, "missing header");
  if (!(ls >> word >> n >> word >> socs >> word >> eqs >> word >> les) || n < 0) bad_program(line_no, "bad header");
  ConeProgram cp;
  cp.add_variables(n);
  next_line(ls);
  if (!(ls >> word) || word != "objective") bad_program(line_no, "missing objective");
  for (const auto& [i, c] : read_row(ls, line_no, n)) cp.add_objective(i, c);
  for (std::size_t k = 0; k < eqs + les; ++k) {
    next_line(ls);
    std::string kind, block;
    if (!(ls >> kind >> block) || kind != (k < eqs ? "eq" : "le")) bad_program(line_no, "expected a linear row");
    cp.set_block(block);
    SparseRow row = read_row(ls, line_no, n);
    const double rhs = read_constant(ls, line_no);
    if (k < eqs) {
      cp.add_equality(std::move(row), rhs);
    } else {
      cp.add_inequality(std::move(row), rhs);
    }
  }
  for (std::size_t k = 0; k < socs; ++k) {
    next_line(ls);
    std::string kind, block;
    std::size_t dim = 0;
    if (!(ls >> kind >> block >> dim) || kind != "soc") bad_program(line_no, "expected a cone");
    cp.set_block(block);
    auto form = [&](const char* tag) {
      next_line(ls);
      std::string t;
      if (!(ls >> t) || t != tag) bad_program(line_no, std::string("expected ") + tag);
      AffineForm f;
      f.terms = read_row(ls, line_no, n);
      f.constant = read_constant(ls, line_no);
      return f;
    };
    AffineForm rhs = form("rhs");
    std::vector<AffineForm> lhs;
    for (std::size_t i = 0; i < dim; ++i) lhs.push_back(form("lhs"));
    cp.add_soc(std::move(lhs), std::move(rhs));
  }
  return cp;
}

}  // namespace safeflight
