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

// Homogeneous self-dual interior-point method for
//   min c'x  s.t.  Ax = b,  h - Gx in K,
// K = nonnegative orthant x second-order cones. Search directions use
// Nesterov-Todd scaling and a Mehrotra predictor-corrector; the KKT system is
// solved by sparse LDL' with static regularization and iterative refinement.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCore>

#include "safeflight/cone_program.hpp"
#include "sparse_ldl.hpp"

namespace safeflight {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

constexpr double kStepFactor = 0.99;
constexpr double kRegularization = 1e-9;
constexpr int kRefinementSteps = 8;
constexpr double kRefinementStall = 0.2;
// Loose screen on the scaled primal residual before the exact check.
constexpr double kPrimalAcceptance = 1e-4;

struct StandardForm {
  int n = 0;
  VectorXd c;
  SparseMat a;
  VectorXd b;
  SparseMat g;
  VectorXd h;
  int lp_dim = 0;
  std::vector<int> soc_offsets;
  std::vector<int> soc_dims;
  int m() const { return static_cast<int>(h.size()); }
  int p() const { return static_cast<int>(b.size()); }
  int degree() const { return lp_dim + static_cast<int>(soc_dims.size()); }
};

StandardForm to_standard_form(const ConeProgram& cp) {
  StandardForm sf;
  sf.n = cp.variable_count();
  sf.c = Eigen::Map<const VectorXd>(cp.objective().data(), sf.n);

  std::vector<Eigen::Triplet<double>> at;
  sf.b.resize(static_cast<Eigen::Index>(cp.equalities().size()));
  int row = 0;
  for (const auto& e : cp.equalities()) {
    for (const auto& [j, v] : e.row) at.emplace_back(row, j, v);
    sf.b[row++] = e.rhs;
  }
  sf.a.resize(row, sf.n);
  sf.a.setFromTriplets(at.begin(), at.end());

  // LP rows first: explicit inequalities, then SOCs with empty lhs.
  std::vector<Eigen::Triplet<double>> gt;
  std::vector<double> h;
  auto push_row = [&](const SparseRow& terms, double sign) {
    const int r = static_cast<int>(h.size());
    for (const auto& [j, v] : terms) gt.emplace_back(r, j, sign * v);
  };
  for (const auto& c : cp.inequalities()) {
    push_row(c.row, 1.0);
    h.push_back(c.rhs);
  }
  for (const auto& c : cp.socs()) {
    if (!c.lhs.empty()) continue;
    push_row(c.rhs.terms, -1.0);
    h.push_back(c.rhs.constant);
  }
  sf.lp_dim = static_cast<int>(h.size());
  for (const auto& c : cp.socs()) {
    if (c.lhs.empty()) continue;
    sf.soc_offsets.push_back(static_cast<int>(h.size()));
    sf.soc_dims.push_back(static_cast<int>(c.lhs.size()) + 1);
    push_row(c.rhs.terms, -1.0);
    h.push_back(c.rhs.constant);
    for (const auto& f : c.lhs) {
      push_row(f.terms, -1.0);
      h.push_back(f.constant);
    }
  }
  sf.h = Eigen::Map<const VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  sf.g.resize(sf.m(), sf.n);
  sf.g.setFromTriplets(gt.begin(), gt.end());

  return sf;
}

// Nesterov-Todd scaling W (symmetric, block diagonal) with W z = W^{-1} s.
struct SocScale {
  double eta = 1.0;
  VectorXd wbar;  // unit hyperbolic vector, wbar' J wbar = 1
};

struct Scaling {
  VectorXd lp_w;
  std::vector<SocScale> soc;
};

class Cones {
 public:
  explicit Cones(const StandardForm& sf) : sf_(sf) {}

  Scaling identity() const {
    Scaling w;
    w.lp_w = VectorXd::Ones(sf_.lp_dim);
    for (int q : sf_.soc_dims) {
      SocScale sc;
      sc.wbar = VectorXd::Zero(q);
      sc.wbar[0] = 1.0;
      w.soc.push_back(std::move(sc));
    }
    return w;
  }

  Scaling nesterov_todd(const VectorXd& s, const VectorXd& z) const {
    Scaling w;
    w.lp_w = (s.head(sf_.lp_dim).array() / z.head(sf_.lp_dim).array()).sqrt();
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const auto sk = s.segment(sf_.soc_offsets[k], sf_.soc_dims[k]);
      const auto zk = z.segment(sf_.soc_offsets[k], sf_.soc_dims[k]);
      const double s_res = std::sqrt(std::max(jnorm2(sk), tiny()));
      const double z_res = std::sqrt(std::max(jnorm2(zk), tiny()));
      const VectorXd sbar = sk / s_res;
      const VectorXd zbar = zk / z_res;
      const double gamma = std::sqrt(std::max(0.5 * (1.0 + sbar.dot(zbar)), tiny()));
      VectorXd wbar = sbar;
      wbar[0] += zbar[0];
      wbar.tail(wbar.size() - 1) -= zbar.tail(zbar.size() - 1);
      wbar /= 2.0 * gamma;
      SocScale sc;
      sc.eta = std::sqrt(s_res / z_res);
      sc.wbar = std::move(wbar);
      w.soc.push_back(std::move(sc));
    }
    return w;
  }

  VectorXd apply_w(const Scaling& w, const VectorXd& v, bool inverse) const {
    VectorXd out(v.size());
    if (inverse) {
      out.head(sf_.lp_dim) = v.head(sf_.lp_dim).array() / w.lp_w.array();
    } else {
      out.head(sf_.lp_dim) = v.head(sf_.lp_dim).array() * w.lp_w.array();
    }
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = sf_.soc_offsets[k], q = sf_.soc_dims[k];
      out.segment(o, q) = apply_soc_w(w.soc[k], v.segment(o, q), inverse);
    }
    return out;
  }

  static VectorXd apply_soc_w(const SocScale& sc, const VectorXd& v, bool inverse) {
    const auto& wb = sc.wbar;
    const Eigen::Index q = v.size();
    const double w0 = wb[0];
    const double dot1 = wb.tail(q - 1).dot(v.tail(q - 1));
    VectorXd out(q);
    if (!inverse) {
      out[0] = w0 * v[0] + dot1;
      out.tail(q - 1) = v.tail(q - 1) + (v[0] + dot1 / (1.0 + w0)) * wb.tail(q - 1);
      return sc.eta * out;
    }
    out[0] = w0 * v[0] - dot1;
    out.tail(q - 1) = v.tail(q - 1) + (-v[0] + dot1 / (1.0 + w0)) * wb.tail(q - 1);
    return out / sc.eta;
  }

  VectorXd jordan_product(const VectorXd& u, const VectorXd& v) const {
    VectorXd out(u.size());
    out.head(sf_.lp_dim) = u.head(sf_.lp_dim).array() * v.head(sf_.lp_dim).array();
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = sf_.soc_offsets[k], q = sf_.soc_dims[k];
      const auto uk = u.segment(o, q);
      const auto vk = v.segment(o, q);
      out[o] = uk.dot(vk);
      out.segment(o + 1, q - 1) = uk[0] * vk.tail(q - 1) + vk[0] * uk.tail(q - 1);
    }
    return out;
  }

  // v with lambda o v = u.
  VectorXd jordan_divide(const VectorXd& lambda, const VectorXd& u) const {
    VectorXd out(u.size());
    out.head(sf_.lp_dim) = u.head(sf_.lp_dim).array() / lambda.head(sf_.lp_dim).array();
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = sf_.soc_offsets[k], q = sf_.soc_dims[k];
      const auto l = lambda.segment(o, q);
      const auto uk = u.segment(o, q);
      const double det = jnorm2(l);
      const double v0 = (l[0] * uk[0] - l.tail(q - 1).dot(uk.tail(q - 1))) / det;
      out[o] = v0;
      out.segment(o + 1, q - 1) = (uk.tail(q - 1) - v0 * l.tail(q - 1)) / l[0];
    }
    return out;
  }

  VectorXd identity_element() const {
    VectorXd e = VectorXd::Zero(sf_.m());
    e.head(sf_.lp_dim).setOnes();
    for (int o : sf_.soc_offsets) e[o] = 1.0;
    return e;
  }

  // Smallest alpha with u + alpha e on the cone boundary (negative when u is
  // interior).
  double boundary_shift(const VectorXd& u) const {
    double alpha = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < sf_.lp_dim; ++i) alpha = std::max(alpha, -u[i]);
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = sf_.soc_offsets[k], q = sf_.soc_dims[k];
      alpha = std::max(alpha, u.segment(o + 1, q - 1).norm() - u[o]);
    }
    return alpha;
  }

  // Largest alpha with u + alpha d in the cone, for interior u.
  double max_step(const VectorXd& u, const VectorXd& d) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sf_.lp_dim; ++i) {
      if (d[i] < 0.0) alpha = std::min(alpha, -u[i] / d[i]);
    }
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = sf_.soc_offsets[k], q = sf_.soc_dims[k];
      alpha = std::min(alpha, soc_step(u.segment(o, q), d.segment(o, q)));
    }
    return alpha;
  }

  double complementarity(const VectorXd& s, const VectorXd& z) const { return s.dot(z); }

 private:
  template <typename A, typename B>
  static double jdot(const A& u, const B& v) {
    return u[0] * v[0] - u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
  }
  // u0^2 - ||u1||^2 in factored form, which keeps relative accuracy near
  // the cone boundary.
  template <typename A>
  static double jnorm2(const A& u) {
    const double t = u.tail(u.size() - 1).norm();
    return (u[0] - t) * (u[0] + t);
  }
  static double tiny() { return std::numeric_limits<double>::min(); }

  static double soc_step(const VectorXd& u, const VectorXd& d) {
    const double qa = jdot(d, d);
    const double qb = 2.0 * jdot(u, d);
    const double qc = jnorm2(u);
    const double inf = std::numeric_limits<double>::infinity();
    if (d[0] >= 0.0 && qa >= 0.0) return inf;
    // Smallest positive root of qa t^2 + qb t + qc.
    if (qa == 0.0) return qb < 0.0 ? -qc / qb : inf;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return inf;
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
    double best = inf;
    for (double root : {qq / qa, qq != 0.0 ? qc / qq : inf}) {
      if (root > 0.0) best = std::min(best, root);
    }
    if (best == inf && d[0] < 0.0) best = -u[0] / d[0];
    return best;
  }

  const StandardForm& sf_;
};

// Solves [0 A' G'; A 0 0; G 0 -W^2] (dx, dy, dz) = (r1, r2, r3) with a sparse
// LDL' factorization of the regularized quasi-definite matrix, followed by
// iterative refinement against the unregularized system.
class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const Cones& cones) : sf_(sf), cones_(cones) {
    const int n = sf_.n, p = sf_.p(), m = sf_.m();
    const int zo = n + p;
    dim_ = n + p + m;
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < dim_; ++i) t.emplace_back(i, i, 0.0);
    for (int r = 0; r < p; ++r) {
      for (SparseMat::InnerIterator it(sf_.a, r); it; ++it) {
        t.emplace_back(n + r, static_cast<int>(it.col()), it.value());
      }
    }
    for (int r = 0; r < m; ++r) {
      for (SparseMat::InnerIterator it(sf_.g, r); it; ++it) {
        t.emplace_back(zo + r, static_cast<int>(it.col()), it.value());
      }
    }
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = zo + sf_.soc_offsets[k], q = sf_.soc_dims[k];
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < i; ++j) t.emplace_back(o + i, o + j, 0.0);
      }
    }
    lower_.resize(dim_, dim_);
    lower_.setFromTriplets(t.begin(), t.end());
    lower_.makeCompressed();
    std::vector<int> signs(static_cast<std::size_t>(dim_), -1);
    for (int i = 0; i < n; ++i) signs[static_cast<std::size_t>(i)] = 1;
    ldl_.analyze(lower_, std::move(signs));
  }

  void factor(const Scaling& w) {
    w_ = &w;
    const int n = sf_.n, p = sf_.p();
    const int zo = n + p;
    for (int i = 0; i < n; ++i) lower_.coeffRef(i, i) = kRegularization;
    for (int i = 0; i < p; ++i) lower_.coeffRef(n + i, n + i) = -kRegularization;
    for (int i = 0; i < sf_.lp_dim; ++i) {
      lower_.coeffRef(zo + i, zo + i) = -w.lp_w[i] * w.lp_w[i] - kRegularization;
    }
    for (std::size_t k = 0; k < sf_.soc_dims.size(); ++k) {
      const int o = zo + sf_.soc_offsets[k], q = sf_.soc_dims[k];
      const MatrixXd w2 = soc_w_squared(w.soc[k], q);
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < i; ++j) lower_.coeffRef(o + i, o + j) = -w2(i, j);
        lower_.coeffRef(o + i, o + i) = -w2(i, i) - kRegularization;
      }
    }
    ldl_.factorize(lower_);
  }

  void solve(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3,
             VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
    const int n = sf_.n, p = sf_.p(), m = sf_.m();
    VectorXd rhs(n + p + m);
    rhs << r1, r2, r3;
    VectorXd sol = ldl_.solve(rhs);
    // A correction that fails to shrink the residual is discarded, and
    // refinement stops once it no longer pays off.
    VectorXd res = rhs - apply(sol);
    double err = res.lpNorm<Eigen::Infinity>();
    const double floor = 1e-13 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    for (int it = 0; it < kRefinementSteps && err > floor; ++it) {
      const VectorXd next = sol + ldl_.solve(res);
      VectorXd next_res = rhs - apply(next);
      const double next_err = next_res.lpNorm<Eigen::Infinity>();
      if (!(next_err < err)) break;
      sol = next;
      res = std::move(next_res);
      const bool stalled = next_err > kRefinementStall * err;
      err = next_err;
      if (stalled) break;
    }
    dx = sol.head(n);
    dy = sol.segment(n, p);
    dz = sol.tail(m);
  }

 private:
  // W^2 = eta^2 (2 wbar wbar' - J) with J = diag(1, -I).
  static MatrixXd soc_w_squared(const SocScale& sc, int q) {
    MatrixXd w2 = 2.0 * sc.wbar * sc.wbar.transpose();
    w2(0, 0) -= 1.0;
    w2.diagonal().tail(q - 1).array() += 1.0;
    return sc.eta * sc.eta * w2;
  }

  // Unregularized KKT matrix times v.
  VectorXd apply(const VectorXd& v) const {
    const int n = sf_.n, p = sf_.p(), m = sf_.m();
    const auto vx = v.head(n);
    const auto vy = v.segment(n, p);
    const VectorXd vz = v.tail(m);
    VectorXd out(n + p + m);
    out.head(n) = sf_.a.transpose() * vy + sf_.g.transpose() * vz;
    out.segment(n, p) = sf_.a * vx;
    out.tail(m) = sf_.g * vx - cones_.apply_w(*w_, cones_.apply_w(*w_, vz, false), false);
    return out;
  }

  const StandardForm& sf_;
  const Cones& cones_;
  const Scaling* w_ = nullptr;
  int dim_ = 0;
  Eigen::SparseMatrix<double> lower_;
  detail::SparseLdl ldl_;
};

}  // namespace

Solution solve(const ConeProgram& cp, const SolveOptions& options) {
  const StandardForm sf = to_standard_form(cp);
  const Cones cones(sf);
  const int n = sf.n, p = sf.p(), m = sf.m();
  Solution out;
  out.x = VectorXd::Zero(n);

  if (m == 0 && p == 0) {
    out.status = sf.c.isZero() ? SolveStatus::kOptimal : SolveStatus::kUnbounded;
    return out;
  }

  KktSolver kkt(sf, cones);
  const VectorXd e = cones.identity_element();

  // Starting point from two least-squares style solves with W = I.
  Scaling w = cones.identity();
  kkt.factor(w);
  VectorXd x, y, z, s;
  {
    VectorXd dz;
    kkt.solve(VectorXd::Zero(n), sf.b, sf.h, x, y, dz);
    s = -dz;
    const double alpha = cones.boundary_shift(s);
    if (alpha >= 0.0) s += (1.0 + alpha) * e;
    VectorXd dx, dy;
    kkt.solve(-sf.c, VectorXd::Zero(p), VectorXd::Zero(m), dx, y, z);
    const double alpha_d = cones.boundary_shift(z);
    if (alpha_d >= 0.0) z += (1.0 + alpha_d) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const double norm_c = std::max(1.0, sf.c.norm());
  const double norm_b = std::max(1.0, sf.b.norm());
  const double norm_h = std::max(1.0, sf.h.norm());
  const int degree = sf.degree();

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    out.iterations = iter;
    const VectorXd aty_gtz = sf.a.transpose() * y + sf.g.transpose() * z;
    const VectorXd rx = aty_gtz + sf.c * tau;
    const VectorXd ax = sf.a * x;
    const VectorXd gx = sf.g * x;
    const VectorXd ry = ax - sf.b * tau;
    const VectorXd rz = s + gx - sf.h * tau;
    const double cx = sf.c.dot(x), by = sf.b.dot(y), hz = sf.h.dot(z);
    const double rt = kappa + cx + by + hz;

    const double gap = s.dot(z);
    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double pres = std::max(ry.norm() / norm_b, rz.norm() / norm_h) / tau;
    const double dres = rx.norm() / norm_c / tau;
    const double abs_gap = gap / (tau * tau);
    double rel_gap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) rel_gap = abs_gap / -pcost;
    if (dcost > 0.0) rel_gap = abs_gap / dcost;

    // The embedding's primal residual also carries slack error, so once the
    // dual side and gap have converged the candidate is judged by its own
    // constraint violation.
    if (dres < options.feasibility_tol &&
        (abs_gap < options.objective_tol || rel_gap < options.objective_tol) &&
        pres < kPrimalAcceptance) {
      const VectorXd xhat = x / tau;
      const double residual = max_constraint_residual(cp, xhat);
      if (residual <= options.feasibility_tol) {
        out.status = SolveStatus::kOptimal;
        out.x = xhat;
        out.objective = sf.c.dot(xhat);
        out.max_residual = residual;
        return out;
      }
    }
    if (hz + by < 0.0 && aty_gtz.norm() / -(hz + by) < options.feasibility_tol) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
    if (cx < 0.0 && std::max(ax.norm(), (gx + s).norm()) / -cx < options.feasibility_tol) {
      out.status = SolveStatus::kUnbounded;
      return out;
    }
    if (iter == options.max_iterations) break;

    w = cones.nesterov_todd(s, z);
    const VectorXd lambda = cones.apply_w(w, z, false);
    kkt.factor(w);

    VectorXd x1, y1, z1;
    kkt.solve(-sf.c, sf.b, sf.h, x1, y1, z1);
    const double denom_base = -(sf.c.dot(x1) + sf.b.dot(y1) + sf.h.dot(z1));

    auto direction = [&](double sig, const VectorXd& ds, double dk, VectorXd& dx,
                         VectorXd& dy, VectorXd& dz, VectorXd& dsv, double& dtau,
                         double& dkappa) {
      const double f = 1.0 - sig;
      const VectorXd lds = cones.jordan_divide(lambda, ds);
      VectorXd x2, y2, z2;
      kkt.solve(-f * rx, -f * ry, -f * rz + cones.apply_w(w, lds, false), x2, y2, z2);
      dtau = (f * rt - dk / tau + sf.c.dot(x2) + sf.b.dot(y2) + sf.h.dot(z2)) /
             (kappa / tau + denom_base);
      dx = x2 + dtau * x1;
      dy = y2 + dtau * y1;
      dz = z2 + dtau * z1;
      dsv = -cones.apply_w(w, lds + cones.apply_w(w, dz, false), false);
      dkappa = -(dk + kappa * dtau) / tau;
    };

    auto step_length = [&](const VectorXd& dsv, const VectorXd& dz, double dtau,
                           double dkappa) {
      double a = std::min(cones.max_step(s, dsv), cones.max_step(z, dz));
      if (dtau < 0.0) a = std::min(a, -tau / dtau);
      if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
      return a;
    };

    const double mu = (gap + tau * kappa) / (degree + 1);

    // Predictor.
    VectorXd dx, dy, dz, dsv;
    double dtau = 0.0, dkappa = 0.0;
    const VectorXd ll = cones.jordan_product(lambda, lambda);
    direction(0.0, ll, kappa * tau, dx, dy, dz, dsv, dtau, dkappa);
    const double alpha_aff = std::min(1.0, step_length(dsv, dz, dtau, dkappa));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector.
    const VectorXd winv_ds = cones.apply_w(w, dsv, true);
    const VectorXd w_dz = cones.apply_w(w, dz, false);
    const VectorXd ds = ll + cones.jordan_product(winv_ds, w_dz) - sigma * mu * e;
    const double dk = kappa * tau + dkappa * dtau - sigma * mu;
    direction(sigma, ds, dk, dx, dy, dz, dsv, dtau, dkappa);
    const double alpha = std::min(1.0, kStepFactor * step_length(dsv, dz, dtau, dkappa));
    if (!(alpha > 1e-12) || !dx.allFinite() || !dz.allFinite()) break;

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * dsv;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  out.status = SolveStatus::kNumericalFailure;
  if (tau > 0.0) {
    out.x = x / tau;
    out.objective = sf.c.dot(out.x);
    out.max_residual = max_constraint_residual(cp, out.x);
  }
  return out;
}

}  // namespace safeflight
