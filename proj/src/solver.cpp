#include "itee/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <Eigen/Dense>

#include "itee/errors.hpp"

namespace itee {

IncrementalResponse incremental_constitutive(const EffectiveConstants& ec, const Mat& gu,
                                             const Vec& gphi, double th, const Vec& gth) {
  const int d = ec.dim;
  IncrementalResponse r;
  for (int M = 0; M < d; ++M) {
    for (int a = 0; a < d; ++a) {
      double k = -ec.rho0 * ec.Lam(M, a) * th;
      for (int L = 0; L < d; ++L) {
        k += ec.R(L, M, a) * gphi(L);
        for (int c = 0; c < d; ++c) k += ec.G(M, a, L, c) * gu(c, L);
      }
      r.K1(M, a) = k;
    }
    double dl = ec.rho0 * ec.P(M) * th;
    double q = -ec.kap_1(M) * th;
    for (int N = 0; N < d; ++N) {
      dl -= ec.L(M, N) * gphi(N);
      q -= ec.kap_E(M, N) * gphi(N) + ec.kap_2(M, N) * gth(N);
      for (int c = 0; c < d; ++c) {
        dl += ec.R(M, N, c) * gu(c, N);
        q -= ec.kap_u(M, N, c) * gu(c, N);
      }
    }
    r.Delta1(M) = dl;
    r.Q1(M) = q;
  }
  double eta = ec.alpha * th;
  for (int M = 0; M < d; ++M) {
    eta -= ec.P(M) * gphi(M);
    for (int c = 0; c < d; ++c) eta += ec.Lam(M, c) * gu(c, M);
  }
  r.eta1 = eta;
  return r;
}

IncrementalState zero_state(const Grid& g, double t) {
  IncrementalState s;
  s.t = t;
  s.u = Field(g.nodes(), g.dim());
  s.v = Field(g.nodes(), g.dim());
  s.phi = Field(g.nodes(), 1);
  s.theta = Field(g.nodes(), 1);
  return s;
}

QuadFields quad_fields(const QuadPoint& q, const IncrementalState& s, int d) {
  QuadFields f;
  for (int c = 0; c < d; ++c) {
    const Vec gc = quad_gradient(q, s.u, d, c);
    for (int L = 0; L < d; ++L) f.grad_u(c, L) = gc(L);
  }
  f.grad_phi = quad_gradient(q, s.phi, d);
  f.grad_theta = quad_gradient(q, s.theta, d);
  f.theta = s.theta.at(q.node);
  return f;
}

namespace {

struct Entry {
  int node;
  int axis;
  double coef;
};

std::vector<Entry> grad_entries(const QuadPoint& q, int d) {
  std::vector<Entry> e;
  for (int a = 0; a < d; ++a) {
    e.push_back({q.plus[a], a, q.inv_h[a]});
    e.push_back({q.minus[a], a, -q.inv_h[a]});
  }
  return e;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

Discretization::Discretization(const MaterialModel& m, const BiasState& b, const Grid& g)
    : grid_(g), mat_(m), bias_(b) {
  m.validate();
  if (g.dim() != m.dim || b.dim != m.dim) throw ValidationError("material, bias and grid dimensions differ");
  const int d = dim();
  const int nn = g.nodes();
  ec_.reserve(nn);
  theta0_.resize(nn);
  for (int k = 0; k < nn; ++k) {
    theta0_[k] = b.theta(g.coord(k));
    ec_.push_back(effective_constants(m, b, theta0_[k]));
  }

  const int cphi = phi_comp();
  const int cth = theta_comp();
  Triplets ta, th, tc;
  for (const auto& q : g.corner_quadrature()) {
    const auto& ec = ec_[q.node];
    const double w = q.weight;
    const auto ent = grad_entries(q, d);
    const int tq = dof(q.node, cth);
    for (const auto& te : ent) {
      const int M = te.axis;
      const double wt = w * te.coef;
      for (int a = 0; a < d; ++a) {
        const int row = dof(te.node, a);
        for (const auto& tr : ent) {
          const int L = tr.axis;
          for (int c = 0; c < d; ++c)
            ta.emplace_back(row, dof(tr.node, c), wt * ec.G(M, a, L, c) * tr.coef);
          ta.emplace_back(row, dof(tr.node, cphi), wt * ec.R(L, M, a) * tr.coef);
        }
        ta.emplace_back(row, tq, -wt * ec.rho0 * ec.Lam(M, a));
      }
      const int grow = dof(te.node, cphi);
      const int hrow = dof(te.node, cth);
      for (const auto& tr : ent) {
        const int N = tr.axis;
        for (int c = 0; c < d; ++c) {
          ta.emplace_back(grow, dof(tr.node, c), wt * ec.R(M, N, c) * tr.coef);
          tc.emplace_back(hrow, dof(tr.node, c), wt * ec.kap_u(M, N, c) * tr.coef);
        }
        ta.emplace_back(grow, dof(tr.node, cphi), -wt * ec.L(M, N) * tr.coef);
        tc.emplace_back(hrow, dof(tr.node, cphi), wt * ec.kap_E(M, N) * tr.coef);
        tc.emplace_back(hrow, dof(tr.node, cth), wt * ec.kap_2(M, N) * tr.coef);
      }
      ta.emplace_back(grow, tq, wt * ec.rho0 * ec.P(M));
      tc.emplace_back(hrow, tq, wt * ec.kap_1(M));
    }
    // entropy rate row, tested at the quadrature node
    const double wh = w * ec.rho0 * theta0_[q.node];
    for (const auto& tr : ent) {
      const int M = tr.axis;
      for (int c = 0; c < d; ++c) th.emplace_back(tq, dof(tr.node, c), wh * ec.Lam(M, c) * tr.coef);
      th.emplace_back(tq, dof(tr.node, cphi), -wh * ec.P(M) * tr.coef);
    }
    th.emplace_back(tq, tq, wh * ec.alpha);
  }
  const int n = ndof();
  A_.resize(n, n);
  H_.resize(n, n);
  C_.resize(n, n);
  A_.setFromTriplets(ta.begin(), ta.end());
  H_.setFromTriplets(th.begin(), th.end());
  C_.setFromTriplets(tc.begin(), tc.end());
  A_.prune(0.0);
  H_.prune(0.0);
  C_.prune(0.0);

  mass_ = Eigen::VectorXd::Zero(n);
  const auto& vw = g.volume_weights();
  for (int k = 0; k < nn; ++k)
    for (int a = 0; a < d; ++a) mass_(dof(k, a)) = m.rho0 * vw[k];

  essential_.assign(n, 0);
  for (int k = 0; k < nn; ++k) {
    if (g.side(Physics::Mechanical, k) == Side::Essential)
      for (int a = 0; a < d; ++a) essential_[dof(k, a)] = 1;
    if (g.side(Physics::Electric, k) == Side::Essential) {
      essential_[dof(k, cphi)] = 1;
      has_electric_essential_ = true;
    }
    if (g.side(Physics::Thermal, k) == Side::Essential) essential_[dof(k, cth)] = 1;
  }
}

Eigen::VectorXd Discretization::pack(const Field& u, const Field& phi, const Field& theta) const {
  const int d = dim();
  Eigen::VectorXd x(ndof());
  for (int k = 0; k < grid_.nodes(); ++k) {
    for (int a = 0; a < d; ++a) x(dof(k, a)) = u.at(k, a);
    x(dof(k, phi_comp())) = phi.at(k);
    x(dof(k, theta_comp())) = theta.at(k);
  }
  return x;
}

void Discretization::unpack(const Eigen::VectorXd& x, Field& u, Field& phi, Field& theta) const {
  const int d = dim();
  for (int k = 0; k < grid_.nodes(); ++k) {
    for (int a = 0; a < d; ++a) u.at(k, a) = x(dof(k, a));
    phi.at(k) = x(dof(k, phi_comp()));
    theta.at(k) = x(dof(k, theta_comp()));
  }
}

Eigen::VectorXd Discretization::pack_velocity(const Field& v) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ndof());
  for (int k = 0; k < grid_.nodes(); ++k)
    for (int a = 0; a < dim(); ++a) x(dof(k, a)) = v.at(k, a);
  return x;
}

Eigen::VectorXd Discretization::loads(const IncrementalAction& a, double t) const {
  const int d = dim();
  const int nn = grid_.nodes();
  Field u(nn, d), phi(nn, 1), theta(nn, 1);
  const BoundaryLoads bl = apply_boundary_conditions(grid_, a, t, u, phi, theta);
  const Field f = load_field(grid_, a.body_force, d, t);
  const Field rho_e = load_field(grid_, a.charge, 1, t);
  const Field gam = load_field(grid_, a.heat_source, 1, t);
  const auto& vw = grid_.volume_weights();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(ndof());
  for (int k = 0; k < nn; ++k) {
    for (int c = 0; c < d; ++c)
      r(dof(k, c)) = vw[k] * mat_.rho0 * f.at(k, c) + bl.traction.at(k, c);
    r(dof(k, phi_comp())) = -vw[k] * rho_e.at(k) - bl.surface_charge.at(k);
    r(dof(k, theta_comp())) = vw[k] * mat_.rho0 * gam.at(k) - bl.heat_flux.at(k);
  }
  return r;
}

double Discretization::max_wave_speed() const {
  const int d = dim();
  double cmax = 0.0;
  for (const auto& ec : ec_) {
    Eigen::MatrixXd Q(d * d, d * d);
    for (int M = 0; M < d; ++M)
      for (int a = 0; a < d; ++a)
        for (int L = 0; L < d; ++L)
          for (int c = 0; c < d; ++c) Q(M * d + a, L * d + c) = ec.G(M, a, L, c) / ec.rho0;
    const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    cmax = std::max(cmax, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
  }
  return cmax;
}

namespace {

// Replace the listed rows of a column-major sparse matrix by identity rows.
Eigen::SparseMatrix<double> with_identity_rows(const Eigen::SparseMatrix<double>& A,
                                               const std::vector<char>& rows) {
  Triplets t;
  t.reserve(A.nonZeros() + rows.size());
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      if (!rows[it.row()]) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    if (rows[i]) t.emplace_back(i, i, 1.0);
  Eigen::SparseMatrix<double> B(A.rows(), A.cols());
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

}  // namespace

Solver::Solver(std::shared_ptr<const Discretization> disc, const IntegratorSpec& spec)
    : disc_(std::move(disc)), dt_(spec.dt) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ValidationError("time step must be positive");
  const Discretization& D = *disc_;
  const int d = D.dim();
  const int n = D.ndof();
  const Grid& g = D.grid();

  double hmin = g.h(0);
  for (int a = 1; a < d; ++a) hmin = std::min(hmin, g.h(a));
  const double cmax = D.max_wave_speed();
  if (cmax > 0.0 && dt_ > hmin / cmax) {
    if (spec.strict_stability)
      throw StabilityViolation("time step " + std::to_string(dt_) + " exceeds h / c_max = " +
                               std::to_string(hmin / cmax));
    stability_warning_ = true;
  }

  if (!D.has_electric_essential()) {
    if (!spec.gauge_fix)
      throw SolveFailure(
          "singular system: no essential electric boundary and gauge fixing disabled, the "
          "potential is determined only up to a constant");
    pin_phi_ = true;
  }
  std::vector<char> fixed = D.essential();
  if (pin_phi_) fixed[D.dof(0, D.phi_comp())] = 1;

  auto kind = [&](int row) { return row % (d + 2); };
  Triplets t, tk;
  const double m2 = 2.0 / (dt_ * dt_);
  for (int k = 0; k < D.A().outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D.A(), k); it; ++it) {
      const int rk = kind(it.row());
      const bool ucol = kind(it.col()) < d;
      if (rk < d && ucol) {
        t.emplace_back(it.row(), it.col(), 0.5 * it.value());
        tk.emplace_back(it.row(), it.col(), 0.5 * it.value());
      } else {
        t.emplace_back(it.row(), it.col(), it.value());
      }
    }
  for (int k = 0; k < D.H().outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D.H(), k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value() / dt_);
  for (int k = 0; k < D.C().outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D.C(), k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i)
    if (D.mass()(i) != 0.0) t.emplace_back(i, i, m2 * D.mass()(i));
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(t.begin(), t.end());
  S_ = with_identity_rows(S, fixed);
  Kuu_half_.resize(n, n);
  Kuu_half_.setFromTriplets(tk.begin(), tk.end());

  lu_.compute(S_);
  if (lu_.info() != Eigen::Success) throw SolveFailure("factorization of the step matrix failed");

  // Gauss block on the potential dofs for the initial potential.
  const int nn = g.nodes();
  Triplets tg;
  for (int k = 0; k < D.A().outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D.A(), k); it; ++it)
      if (kind(it.row()) == d && kind(it.col()) == d)
        tg.emplace_back(it.row() / (d + 2), it.col() / (d + 2), it.value());
  G_.resize(nn, nn);
  G_.setFromTriplets(tg.begin(), tg.end());
  std::vector<char> gfixed(nn, 0);
  for (int k = 0; k < nn; ++k) gfixed[k] = fixed[D.dof(k, D.phi_comp())];
  G_ = with_identity_rows(G_, gfixed);
  lu_gauss_.compute(G_);
  if (lu_gauss_.info() != Eigen::Success) throw SolveFailure("factorization of the Gauss block failed");
}

IncrementalState Solver::initial_state(const InitialData& ic, const IncrementalAction& a) const {
  const Discretization& D = *disc_;
  const Grid& g = D.grid();
  const int d = D.dim();
  IncrementalState s = zero_state(g, 0.0);
  s.u = load_field(g, ic.u, d, 0.0);
  s.v = load_field(g, ic.v, d, 0.0);
  s.theta = load_field(g, ic.theta, 1, 0.0);
  apply_boundary_conditions(g, a, 0.0, s.u, s.phi, s.theta);

  const int nn = g.nodes();
  Eigen::VectorXd x = D.pack(s);
  for (int k = 0; k < nn; ++k) x(D.dof(k, D.phi_comp())) = 0.0;
  const Eigen::VectorXd r = D.loads(a, 0.0) - D.A() * x;
  Eigen::VectorXd rhs(nn);
  for (int k = 0; k < nn; ++k) {
    const int i = D.dof(k, D.phi_comp());
    if (D.essential()[i])
      rhs(k) = s.phi.at(k);
    else if (pin_phi_ && k == 0)
      rhs(k) = 0.0;
    else
      rhs(k) = r(i);
  }
  const Eigen::VectorXd phi = lu_gauss_.solve(rhs);
  if (lu_gauss_.info() != Eigen::Success) throw SolveFailure("Gauss solve failed");
  for (int k = 0; k < nn; ++k)
    if (!D.essential()[D.dof(k, D.phi_comp())]) s.phi.at(k) = phi(k);
  return s;
}

IncrementalState Solver::step(const IncrementalState& s, const IncrementalAction& a,
                              StepDiagnostics* diag) const {
  const Discretization& D = *disc_;
  const Grid& g = D.grid();
  const int d = D.dim();
  const int n = D.ndof();
  const double t1 = s.t + dt_;

  IncrementalState out = zero_state(g, t1);
  apply_boundary_conditions(g, a, t1, out.u, out.phi, out.theta);

  const Eigen::VectorXd x0 = D.pack(s);
  const Eigen::VectorXd v0 = D.pack_velocity(s.v);
  const Eigen::VectorXd f0 = D.loads(a, s.t);
  const Eigen::VectorXd f1 = D.loads(a, t1);
  const Eigen::VectorXd ku = Kuu_half_ * x0;
  const Eigen::VectorXd hx = D.H() * x0;
  const Eigen::VectorXd xe = D.pack(out);
  const double m2 = 2.0 / (dt_ * dt_);

  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const int kind = i % (d + 2);
    if (D.essential()[i]) {
      rhs(i) = xe(i);
    } else if (kind < d) {
      rhs(i) = 0.5 * (f0(i) + f1(i)) + m2 * D.mass()(i) * (x0(i) + dt_ * v0(i)) - ku(i);
    } else if (kind == d) {
      rhs(i) = (pin_phi_ && i == D.dof(0, d)) ? 0.0 : f1(i);
    } else {
      rhs(i) = f1(i) + hx(i) / dt_;
    }
  }
  Eigen::VectorXd x1 = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !x1.allFinite()) throw SolveFailure("step solve failed");
  for (int i = 0; i < n; ++i)
    if (D.essential()[i]) x1(i) = xe(i);
  D.unpack(x1, out.u, out.phi, out.theta);
  for (int k = 0; k < g.nodes(); ++k)
    for (int c = 0; c < d; ++c)
      out.v.at(k, c) = 2.0 * (out.u.at(k, c) - s.u.at(k, c)) / dt_ - s.v.at(k, c);
  if (diag) {
    diag->t = t1;
    diag->gauss_residual = gauss_residual(out, a);
  }
  return out;
}

double Solver::gauss_residual(const IncrementalState& s, const IncrementalAction& a) const {
  const Discretization& D = *disc_;
  const int d = D.dim();
  const Eigen::VectorXd x = D.pack(s);
  const Eigen::VectorXd f = D.loads(a, s.t);
  const auto& A = D.A();
  const int n = D.ndof();
  Eigen::VectorXd r = -f, scale = f.cwiseAbs();
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      r(it.row()) += it.value() * x(it.col());
      scale(it.row()) += std::abs(it.value() * x(it.col()));
    }
  double rmax = 0.0, smax = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i % (d + 2) != d || D.essential()[i]) continue;
    if (pin_phi_ && i == D.dof(0, d)) continue;
    rmax = std::max(rmax, std::abs(r(i)));
    smax = std::max(smax, scale(i));
  }
  return smax > 0.0 ? rmax / smax : rmax;
}

std::shared_ptr<const Discretization> make_discretization(const Scenario& sc) {
  const Grid g(sc.grid);
  const BiasState b = build_bias_state(sc.material, sc.bias, g);
  return std::make_shared<const Discretization>(sc.material, b, g);
}

Trajectory run_simulation(std::shared_ptr<const Discretization> disc, const IncrementalAction& a,
                          const InitialData& ic, const IntegratorSpec& spec,
                          const StepObserver& observer) {
  validate_action(disc->grid(), a);
  if (!(spec.t_final >= 0.0)) throw ValidationError("t_final must be non-negative");
  if (spec.save_stride < 1) throw ValidationError("save_stride must be at least 1");
  const Solver solver(disc, spec);
  Trajectory tr;
  tr.dt = spec.dt;
  tr.stability_warning = solver.stability_warning();
  const long steps = std::lround(spec.t_final / spec.dt);

  IncrementalState s = solver.initial_state(ic, a);
  tr.states.push_back(s);
  if (observer) observer(s);
  for (long k = 1; k <= steps; ++k) {
    StepDiagnostics dg;
    IncrementalState next = solver.step(s, a, &dg);
    next.t = k * spec.dt;  // avoid drift from repeated addition
    s = std::move(next);
    tr.diagnostics.push_back(dg);
    tr.max_gauss_residual = std::max(tr.max_gauss_residual, dg.gauss_residual);
    if (observer) observer(s);
    if (k % spec.save_stride == 0 || k == steps) tr.states.push_back(s);
  }
  return tr;
}

Trajectory run_simulation(const Scenario& sc, const StepObserver& observer) {
  auto tr = run_simulation(make_discretization(sc), sc.action, sc.initial, sc.integrator, observer);
  tr.name = sc.name;
  return tr;
}

}  // namespace itee
