#include "itee/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "itee/errors.hpp"
#include "itee/kernels.hpp"

namespace itee {

namespace {

double dot_gu(const Tensor4& G, const Mat& a, const Mat& b, int d) {
  // G(M, alpha, L, gamma) a(alpha, M) b(gamma, L)
  double s = 0.0;
  for (int M = 0; M < d; ++M)
    for (int al = 0; al < d; ++al)
      for (int L = 0; L < d; ++L)
        for (int ga = 0; ga < d; ++ga) s += G(M, al, L, ga) * a(al, M) * b(ga, L);
  return s;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const Eigen::VectorXd& v, const std::vector<char>& active) {
  double m = 0.0;
  for (int i = 0; i < v.size(); ++i)
    if (active[i]) m = std::max(m, std::abs(v(i)));
  return m;
}

void require_uniform(const Discretization& d) {
  if (!d.bias().theta_uniform)
    throw NonUniformBiasTemperature("energy functionals need a uniform bias temperature");
}

}  // namespace

EnergyLedger energy_functionals(const Grid& g, const EffectiveConstants& ec, double theta0,
                                const IncrementalState& s) {
  if (!(theta0 > 0.0)) throw NonPositiveTemperature("bias temperature must be positive");
  const int d = g.dim();
  const auto& qp = g.corner_quadrature();
  const int nq = static_cast<int>(qp.size());
  const double rho = ec.rho0;
  EnergyLedger e;
  e.t = s.t;
  auto over_q = [&](auto&& f) {
    return kernels::reduce(nq, [&](int i) {
      const QuadFields q = quad_fields(qp[i], s, d);
      return qp[i].weight * f(q);
    });
  };
  e.W_def = 0.5 * over_q([&](const QuadFields& q) { return dot_gu(ec.G, q.grad_u, q.grad_u, d); });
  e.E_elec = 0.5 * over_q([&](const QuadFields& q) {
    double v = 0.0;
    for (int M = 0; M < d; ++M)
      for (int N = 0; N < d; ++N) v += ec.L(M, N) * q.grad_phi(M) * q.grad_phi(N);
    return v;
  });
  e.C_coupling = over_q([&](const QuadFields& q) {
    double v = 0.0;
    for (int K = 0; K < d; ++K) v -= rho * ec.P(K) * q.theta * q.grad_phi(K);
    return v;
  });
  e.chi_phi = over_q([&](const QuadFields& q) {
    double v = 0.0;
    for (int M = 0; M < d; ++M)
      for (int L = 0; L < d; ++L) v += ec.kap_E(M, L) * q.grad_theta(M) * q.grad_phi(L);
    return v;
  }) / theta0;
  e.chi = over_q([&](const QuadFields& q) {
    double v = 0.0;
    for (int M = 0; M < d; ++M) v += ec.kap_1(M) * q.grad_theta(M) * q.theta;
    return v;
  }) / theta0;
  e.chi_theta = over_q([&](const QuadFields& q) {
    double v = 0.0;
    for (int M = 0; M < d; ++M)
      for (int L = 0; L < d; ++L) v += ec.kap_2(M, L) * q.grad_theta(M) * q.grad_theta(L);
    return v;
  }) / theta0;
  e.chi_u = over_q([&](const QuadFields& q) {
    double v = 0.0;
    for (int M = 0; M < d; ++M)
      for (int L = 0; L < d; ++L)
        for (int a = 0; a < d; ++a) v += ec.kap_u(M, L, a) * q.grad_theta(M) * q.grad_u(a, L);
    return v;
  }) / theta0;

  const auto& vw = g.volume_weights();
  e.K_kin = 0.5 * rho * kernels::reduce(g.nodes(), [&](int k) {
    double v = 0.0;
    for (int a = 0; a < d; ++a) v += s.v.at(k, a) * s.v.at(k, a);
    return vw[k] * v;
  });
  e.P_heat = ec.alpha / (2.0 * theta0) * rho *
             kernels::reduce(g.nodes(), [&](int k) { return vw[k] * s.theta.at(k) * s.theta.at(k); });
  return e;
}

EnergyLedger energy_functionals(const Discretization& d, const IncrementalState& s) {
  require_uniform(d);
  return energy_functionals(d.grid(), d.node_constants(0), d.bias().theta_c, s);
}

double energy_power(const Discretization& d, const IncrementalState& s, const IncrementalAction& a,
                    double dt) {
  require_uniform(d);
  const Grid& g = d.grid();
  const int dim = g.dim();
  const int nn = g.nodes();
  const double rho = d.material().rho0;
  const double th0 = d.bias().theta_c;
  Field u(nn, dim), phi(nn, 1), theta(nn, 1);
  const BoundaryLoads bl = apply_boundary_conditions(g, a, s.t, u, phi, theta);
  const BoundaryLoads bp = apply_boundary_conditions(g, a, s.t + dt, u, phi, theta);
  const BoundaryLoads bm = apply_boundary_conditions(g, a, s.t - dt, u, phi, theta);
  const Field f = load_field(g, a.body_force, dim, s.t);
  const Field gam = load_field(g, a.heat_source, 1, s.t);
  const auto& vw = g.volume_weights();
  double p = 0.0;
  for (int k = 0; k < nn; ++k) {
    for (int c = 0; c < dim; ++c)
      p += (vw[k] * rho * f.at(k, c) + bl.traction.at(k, c)) * s.v.at(k, c);
    p += (vw[k] * rho * gam.at(k) - bl.heat_flux.at(k)) * s.theta.at(k) / th0;
    p += (bp.surface_charge.at(k) - bm.surface_charge.at(k)) / (2.0 * dt) * s.phi.at(k);
  }
  return p;
}

EnergyBalanceReport energy_balance_residual(const Discretization& d, const Trajectory& tr,
                                            const IncrementalAction& a) {
  require_uniform(d);
  if (tr.states.size() != tr.diagnostics.size() + 1)
    throw ValidationError("energy balance needs every time level (save_stride 1)");
  const double dt = tr.dt;
  EnergyBalanceReport r;
  for (const auto& s : tr.states) {
    EnergyLedger e = energy_functionals(d, s);
    e.rhs_power = energy_power(d, s, a, dt);
    r.ledger.push_back(e);
  }
  double ss = 0.0;
  for (size_t n = 1; n + 1 < r.ledger.size(); ++n) {
    const double dtot = (r.ledger[n + 1].total() - r.ledger[n - 1].total()) / (2.0 * dt);
    const double res = dtot + r.ledger[n].dissipation() - r.ledger[n].rhs_power;
    r.ledger[n].residual = res;
    r.t.push_back(r.ledger[n].t);
    r.residual.push_back(res);
    ss += res * res;
    r.max_abs = std::max(r.max_abs, std::abs(res));
  }
  r.norm = r.residual.empty() ? 0.0 : std::sqrt(ss / r.residual.size());
  return r;
}

DissipationReport dissipation_identity(const Grid& g, const EffectiveConstants& ec, double theta0,
                                       const IncrementalState& s, double tol) {
  const int d = g.dim();
  DissipationReport r;
  const EnergyLedger e = energy_functionals(g, ec, theta0, s);
  r.lhs = -e.dissipation();

  bool fourier = sym_eigenvalues(ec.kap_2, d)(0) > 0.0;
  for (double v : ec.kap_u.a) fourier = fourier && v == 0.0;
  for (double v : ec.kap_E.a) fourier = fourier && v == 0.0;
  for (double v : ec.kap_1.a) fourier = fourier && v == 0.0;
  r.fourier_model = fourier;

  const double kn = frobenius(ec.kap_2.a);
  double rhs = 0.0;
  for (const auto& q : g.corner_quadrature()) {
    const QuadFields f = quad_fields(q, s, d);
    const auto resp = incremental_constitutive(ec, f.grad_u, f.grad_phi, f.theta, f.grad_theta);
    double qt = 0.0, gg = 0.0;
    for (int M = 0; M < d; ++M) {
      qt += resp.Q1(M) * f.grad_theta(M);
      gg += f.grad_theta(M) * f.grad_theta(M);
    }
    rhs += q.weight * qt;
    if (fourier && qt > 1e-14 * kn * gg) r.sign_ok = false;
  }
  r.rhs = rhs / theta0;
  r.residual = std::abs(r.lhs - r.rhs);
  r.identity_ok = r.residual <= tol * std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
  return r;
}

double min_eigenvalue_G(const EffectiveConstants& ec) {
  const int d = ec.dim;
  Eigen::MatrixXd Q(d * d, d * d);
  for (int M = 0; M < d; ++M)
    for (int a = 0; a < d; ++a)
      for (int L = 0; L < d; ++L)
        for (int c = 0; c < d; ++c) Q(a * d + M, c * d + L) = ec.G(M, a, L, c);
  const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

UniquenessReport uniqueness_experiment(std::shared_ptr<const Discretization> d,
                                       const IncrementalAction& a, const InitialData& ic1,
                                       const InitialData& ic2, const IntegratorSpec& spec,
                                       bool require_preconditions, double tol) {
  require_uniform(*d);
  UniquenessReport r;
  const EffectiveConstants& ec = d->node_constants(0);
  const double th0 = d->bias().theta_c;
  r.g_min_eig = min_eigenvalue_G(ec);
  const double gscale = std::max(1.0, frobenius(ec.G.a));
  std::string why;
  try {
    r.ignaczak = ignaczak_condition(ec, ec.rho0, th0);
    if (!r.ignaczak.holds) why = "Ignaczak condition |g| <= c lambda_m fails";
  } catch (const NotPositiveDefinite&) {
    why = "effective dielectric tensor L is not positive definite";
  }
  // W >= 0 needs G positive semidefinite; with minor-symmetric c2 in 2-D the
  // infinitesimal rotations are a null direction.
  if (r.g_min_eig < -1e-12 * gscale) why = "effective elastic tensor G is indefinite";
  r.preconditions_hold = why.empty();
  r.note = r.preconditions_hold ? "hypotheses hold" : "inconclusive: " + why;
  if (!r.preconditions_hold && require_preconditions) throw PreconditionFailed(why);

  const Solver solver(d, spec);
  IncrementalState s1 = solver.initial_state(ic1, a);
  IncrementalState s2 = solver.initial_state(ic2, a);
  const long steps = std::lround(spec.t_final / spec.dt);
  auto record = [&](const IncrementalState& x, const IncrementalState& y) {
    IncrementalState diff = x;
    for (size_t i = 0; i < diff.u.values.size(); ++i) diff.u.values[i] -= y.u.values[i];
    for (size_t i = 0; i < diff.v.values.size(); ++i) diff.v.values[i] -= y.v.values[i];
    for (size_t i = 0; i < diff.phi.values.size(); ++i) diff.phi.values[i] -= y.phi.values[i];
    for (size_t i = 0; i < diff.theta.values.size(); ++i)
      diff.theta.values[i] -= y.theta.values[i];
    r.max_difference_norm = std::max({r.max_difference_norm, max_abs(diff.u), max_abs(diff.v),
                                      max_abs(diff.phi), max_abs(diff.theta)});
    const EnergyLedger e = energy_functionals(d->grid(), ec, th0, diff);
    r.t.push_back(x.t);
    r.total.push_back(e.total());
    r.total_no_coupling.push_back(e.total_without_coupling());
  };
  record(s1, s2);
  for (long k = 1; k <= steps; ++k) {
    s1 = solver.step(s1, a);
    s2 = solver.step(s2, a);
    s1.t = s2.t = k * spec.dt;
    record(s1, s2);
  }
  auto max_inc = [](const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i] - v[i - 1]);
    return v.size() > 1 ? m : 0.0;
  };
  const double t0 = r.total.front();
  const double t0n = r.total_no_coupling.front();
  const double inc = max_inc(r.total);
  const double incn = max_inc(r.total_no_coupling);
  r.max_increase = t0 != 0.0 ? inc / std::abs(t0) : inc;
  r.max_increase_no_coupling = t0n != 0.0 ? incn / std::abs(t0n) : incn;
  r.monotone = inc <= tol * std::abs(t0);
  r.monotone_no_coupling = incn <= tol * std::abs(t0n);
  r.final_ratio = t0 != 0.0 ? r.total.back() / t0 : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

double density_psi1(const EffectiveConstants& ec, const LocalIncrement& s) {
  const int d = ec.dim;
  double v = 0.5 * dot_gu(ec.G, s.grad_u, s.grad_u, d);
  double br = 0.5 * ec.alpha * s.theta;
  for (int M = 0; M < d; ++M) {
    br -= ec.P(M) * s.grad_phi(M);
    for (int a = 0; a < d; ++a) {
      br += ec.Lam(M, a) * s.grad_u(a, M);
      for (int L = 0; L < d; ++L) v += ec.R(L, M, a) * s.grad_phi(L) * s.grad_u(a, M);
    }
  }
  return v - ec.rho0 * s.theta * br;
}

double density_H1(const EffectiveConstants& ec, const LocalIncrement& s) {
  double v = density_psi1(ec, s);
  for (int A = 0; A < ec.dim; ++A)
    for (int B = 0; B < ec.dim; ++B) v -= 0.5 * ec.L(A, B) * s.grad_phi(A) * s.grad_phi(B);
  return v;
}

double density_Gamma(const EffectiveConstants& ec, const LocalIncrement& s) {
  const int d = ec.dim;
  double v = 0.0;
  for (int M = 0; M < d; ++M) {
    v += ec.kap_1(M) * s.theta * s.grad_theta(M);
    for (int N = 0; N < d; ++N) {
      v += 0.5 * ec.kap_2(M, N) * s.grad_theta(M) * s.grad_theta(N);
      v += ec.kap_E(M, N) * s.grad_theta(M) * s.grad_phi(N);
      for (int a = 0; a < d; ++a) v += ec.kap_u(M, N, a) * s.grad_u(a, N) * s.grad_theta(M);
    }
  }
  return -v;
}

HamiltonDensityReport hamilton_density_checks(const EffectiveConstants& ec,
                                              const std::vector<LocalIncrement>& states,
                                              double tol) {
  const int d = ec.dim;
  HamiltonDensityReport r;
  double eK = 0, sK = 0, eD = 0, sD = 0, eE = 0, sE = 0, eQ = 0, sQ = 0;
  for (const auto& s : states) {
    double scale = std::abs(s.theta);
    for (int i = 0; i < d; ++i) {
      scale = std::max({scale, std::abs(s.grad_phi(i)), std::abs(s.grad_theta(i))});
      for (int j = 0; j < d; ++j) scale = std::max(scale, std::abs(s.grad_u(i, j)));
    }
    const double h = 1e-3 * std::max(scale, 1e-3);
    const auto resp = incremental_constitutive(ec, s.grad_u, s.grad_phi, s.theta, s.grad_theta);
    auto fd = [&](auto&& perturb, auto&& f) {
      LocalIncrement p = s, m = s;
      perturb(p, h);
      perturb(m, -h);
      return (f(ec, p) - f(ec, m)) / (2.0 * h);
    };
    for (int M = 0; M < d; ++M) {
      for (int a = 0; a < d; ++a) {
        const double v = fd([&](LocalIncrement& x, double e) { x.grad_u(a, M) += e; }, density_H1);
        eK = std::max(eK, std::abs(v - resp.K1(M, a)));
        sK = std::max(sK, std::abs(resp.K1(M, a)));
      }
      // W = -grad phi, so dH/dW_L = -dH/dphi_{,L}
      const double vw = -fd([&](LocalIncrement& x, double e) { x.grad_phi(M) += e; }, density_H1);
      eD = std::max(eD, std::abs(vw + resp.Delta1(M)));
      sD = std::max(sD, std::abs(resp.Delta1(M)));
      const double vq =
          fd([&](LocalIncrement& x, double e) { x.grad_theta(M) += e; }, density_Gamma);
      eQ = std::max(eQ, std::abs(vq - resp.Q1(M)));
      sQ = std::max(sQ, std::abs(resp.Q1(M)));
    }
    const double vt = fd([&](LocalIncrement& x, double e) { x.theta += e; }, density_H1);
    eE = std::max(eE, std::abs(vt + ec.rho0 * resp.eta1));
    sE = std::max(sE, std::abs(ec.rho0 * resp.eta1));
  }
  auto rel = [](double e, double s) { return e == 0.0 ? 0.0 : e / std::max(s, 1e-300); };
  r.err_K = rel(eK, sK);
  r.err_Delta = rel(eD, sD);
  r.err_eta = rel(eE, sE);
  r.err_Q = rel(eQ, sQ);
  r.max_error = std::max({r.err_K, r.err_Delta, r.err_eta, r.err_Q});
  r.pass = r.max_error <= tol;
  return r;
}

VariationalContext make_variational_context(std::shared_ptr<const Discretization> d,
                                            const Vec& kap1_injection) {
  VariationalContext c;
  c.kap1_injection = kap1_injection;
  for (int k = 0; k < d->grid().nodes(); ++k) {
    EffectiveConstants ec = d->node_constants(k);
    for (int M = 0; M < ec.dim; ++M) ec.kap_1(M) += kap1_injection(M);
    c.ec.push_back(ec);
  }
  c.disc = std::move(d);
  return c;
}

namespace {

LocalIncrement local_at(const QuadPoint& q, const IncrementalState& s, int d) {
  const QuadFields f = quad_fields(q, s, d);
  return {f.grad_u, f.grad_phi, f.theta, f.grad_theta};
}

// Unknowns of x written into a state (t and v untouched).
IncrementalState with_unknowns(const Discretization& D, const IncrementalState& base,
                               const Eigen::VectorXd& x) {
  IncrementalState s = base;
  D.unpack(x, s.u, s.phi, s.theta);
  return s;
}

}  // namespace

Eigen::VectorXd heat_residual(const VariationalContext& ctx, const IncrementalState& s0,
                              const IncrementalState& s1, double dt, const IncrementalAction& a) {
  const Discretization& D = *ctx.disc;
  const Grid& g = D.grid();
  const int d = g.dim();
  const Eigen::VectorXd f1 = D.loads(a, s1.t);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(D.ndof());
  for (const auto& q : g.corner_quadrature()) {
    const auto& ec = ctx.ec[q.node];
    const LocalIncrement l0 = local_at(q, s0, d), l1 = local_at(q, s1, d);
    const auto r0 = incremental_constitutive(ec, l0.grad_u, l0.grad_phi, l0.theta, l0.grad_theta);
    const auto r1 = incremental_constitutive(ec, l1.grad_u, l1.grad_phi, l1.theta, l1.grad_theta);
    r(D.dof(q.node, D.theta_comp())) +=
        q.weight * ec.rho0 * D.theta0(q.node) * (r1.eta1 - r0.eta1) / dt;
    for (int M = 0; M < d; ++M) {
      const double c = q.weight * r1.Q1(M) * q.inv_h[M];
      r(D.dof(q.plus[M], D.theta_comp())) -= c;
      r(D.dof(q.minus[M], D.theta_comp())) += c;
    }
  }
  for (int k = 0; k < g.nodes(); ++k) {
    const int i = D.dof(k, D.theta_comp());
    r(i) -= f1(i);
  }
  return r;
}

HamiltonVariationReport hamilton_variation_residual(const VariationalContext& ctx,
                                                    const IncrementalState& s0,
                                                    const IncrementalState& s1, double dt,
                                                    const IncrementalAction& a) {
  const Discretization& D = *ctx.disc;
  const Grid& g = D.grid();
  const int d = g.dim();
  const int n = D.ndof();
  const auto& qp = g.corner_quadrature();
  HamiltonVariationReport r;

  const Eigen::VectorXd f0 = D.loads(a, s0.t);
  const Eigen::VectorXd f1 = D.loads(a, s1.t);
  Eigen::VectorXd f = f1;
  for (int k = 0; k < g.nodes(); ++k)
    for (int c = 0; c < d; ++c) f(D.dof(k, c)) = 0.5 * (f0(D.dof(k, c)) + f1(D.dof(k, c)));

  // Momentum rows sit at the midpoint in u, Gauss rows at the new level.
  IncrementalState mid = s1;
  for (size_t i = 0; i < mid.u.values.size(); ++i)
    mid.u.values[i] = 0.5 * (s0.u.values[i] + s1.u.values[i]);
  const Eigen::VectorXd xm = D.pack(mid);
  const Eigen::VectorXd x1 = D.pack(s1);
  const Eigen::VectorXd dv = (D.pack_velocity(s1.v) - D.pack_velocity(s0.v)) / dt;

  r.active.assign(n, 0);
  const bool pin = !D.has_electric_essential();
  for (int k = 0; k < g.nodes(); ++k)
    for (int c = 0; c < d + 2; ++c) {
      const int i = D.dof(k, c);
      r.active[i] = !D.essential()[i] && !(pin && c == d && k == 0);
    }

  // Discrete Pi with theta fixed at the new level.
  auto Pi = [&](const Eigen::VectorXd& y) {
    const IncrementalState s = with_unknowns(D, mid, y);
    double v = 0.0;
    for (const auto& q : qp) v += q.weight * density_H1(ctx.ec[q.node], local_at(q, s, d));
    for (int k = 0; k < g.nodes(); ++k)
      for (int c = 0; c <= d; ++c) v -= f(D.dof(k, c)) * y(D.dof(k, c));
    return v;
  };
  const double h = std::max(1.0, std::max(xm.cwiseAbs().maxCoeff(), x1.cwiseAbs().maxCoeff()));
  r.el_residual = Eigen::VectorXd::Zero(n);
  r.field_residual = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd axm = D.A() * xm;
  const Eigen::VectorXd ax1 = D.A() * x1;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const int c = i % (d + 2);
    if (!r.active[i] || c > d) continue;
    const Eigen::VectorXd& x = c < d ? xm : x1;
    Eigen::VectorXd xp = x, xn = x;
    xp(i) += h;
    xn(i) -= h;
    const double inertia = c < d ? D.mass()(i) * dv(i) : 0.0;
    r.el_residual(i) = inertia + (Pi(xp) - Pi(xn)) / (2.0 * h);
    const double ax = c < d ? axm(i) : ax1(i);
    r.field_residual(i) = inertia + ax - f(i);
    scale = std::max({scale, std::abs(inertia), std::abs(ax), std::abs(f(i))});
  }
  if (scale == 0.0) scale = 1.0;
  double diff = 0.0;
  for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(r.el_residual(i) - r.field_residual(i)));
  r.el_vs_field = diff / scale;
  r.el_norm = r.el_residual.cwiseAbs().maxCoeff() / scale;
  r.field_norm = r.field_residual.cwiseAbs().maxCoeff() / scale;

  // Psi_h(theta) = sum_q w Gamma - sum_i theta_i (rate_i - source_i) - sum_i theta_i qflux_i
  Eigen::VectorXd rate = Eigen::VectorXd::Zero(n);
  for (const auto& q : qp) {
    const auto& ec = ctx.ec[q.node];
    const LocalIncrement l0 = local_at(q, s0, d), l1 = local_at(q, s1, d);
    const double e0 = incremental_constitutive(ec, l0.grad_u, l0.grad_phi, l0.theta, l0.grad_theta).eta1;
    const double e1 = incremental_constitutive(ec, l1.grad_u, l1.grad_phi, l1.theta, l1.grad_theta).eta1;
    rate(D.dof(q.node, D.theta_comp())) += q.weight * ec.rho0 * D.theta0(q.node) * (e1 - e0) / dt;
  }
  // f1 on thermal rows is source - flux load.
  auto Psi = [&](const Field& th) {
    IncrementalState s = s1;
    s.theta = th;
    double v = 0.0;
    for (const auto& q : qp) v += q.weight * density_Gamma(ctx.ec[q.node], local_at(q, s, d));
    for (int k = 0; k < g.nodes(); ++k) {
      const int i = D.dof(k, D.theta_comp());
      v -= th.at(k) * (rate(i) - f1(i));
    }
    return v;
  };
  const double ht = std::max(1.0, max_abs(s1.theta));
  r.psi_variation = Eigen::VectorXd::Zero(n);
  r.predicted_defect = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < g.nodes(); ++k) {
    const int i = D.dof(k, D.theta_comp());
    if (!r.active[i]) continue;
    Field tp = s1.theta, tm = s1.theta;
    tp.at(k) += ht;
    tm.at(k) -= ht;
    r.psi_variation(i) = (Psi(tp) - Psi(tm)) / (2.0 * ht);
  }
  for (const auto& q : qp) {
    const int i = D.dof(q.node, D.theta_comp());
    if (!r.active[i]) continue;
    const Vec gt = quad_gradient(q, s1.theta, d);
    double v = 0.0;
    for (int M = 0; M < d; ++M) v += ctx.ec[q.node].kap_1(M) * gt(M);
    r.predicted_defect(i) -= q.weight * v;
  }
  r.heat_residual = heat_residual(ctx, s0, s1, dt, a);
  double hscale = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i % (d + 2) != d + 1) continue;
    if (!r.active[i]) {
      r.heat_residual(i) = 0.0;
      continue;
    }
    hscale = std::max({hscale, std::abs(rate(i)), std::abs(f1(i)), std::abs(r.predicted_defect(i))});
  }
  r.defect = r.psi_variation + r.heat_residual;
  double de = 0.0;
  std::vector<char> th_active(n, 0);
  for (int i = 0; i < n; ++i) th_active[i] = r.active[i] && i % (d + 2) == d + 1;
  for (int i = 0; i < n; ++i)
    if (th_active[i]) de = std::max(de, std::abs(r.defect(i) - r.predicted_defect(i)));
  if (hscale == 0.0) hscale = 1.0;
  r.defect_error = de / hscale;
  r.psi_norm = max_abs(r.psi_variation, th_active) / hscale;
  r.heat_norm = max_abs(r.heat_residual, th_active) / hscale;
  return r;
}

// ---------------------------------------------------------------------------

LaplaceAccumulator::LaplaceAccumulator(const Grid& g, double p, double dt)
    : p_(p), dt_(dt) {
  if (!(p > 0.0)) throw ValidationError("Laplace parameter p must be positive");
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  u_ = Field(g.nodes(), g.dim());
  phi_ = Field(g.nodes(), 1);
  theta_ = Field(g.nodes(), 1);
}

void LaplaceAccumulator::add(const IncrementalState& s) {
  const double w = std::exp(-p_ * s.t);
  auto acc = [&](Field& a, const Field& v) {
    kernels::axpy(w * dt_, v.values, a.values);
  };
  acc(u_, s.u);
  acc(phi_, s.phi);
  acc(theta_, s.theta);
  auto scaled = [&](const Field& v) {
    Field f = v;
    for (double& x : f.values) x *= w * dt_;
    return f;
  };
  if (count_ == 0) {
    u0_ = scaled(s.u);
    phi0_ = scaled(s.phi);
    theta0_ = scaled(s.theta);
  }
  ul_ = scaled(s.u);
  phil_ = scaled(s.phi);
  thetal_ = scaled(s.theta);
  t_last_ = s.t;
  last_max_ = std::max({max_abs(s.u), max_abs(s.phi), max_abs(s.theta)});
  ++count_;
}

LaplaceField LaplaceAccumulator::finish(bool check, double rel_budget) const {
  LaplaceField out;
  out.p = p_;
  out.u = u_;
  out.phi = phi_;
  out.theta = theta_;
  if (count_ >= 2) {
    kernels::axpy(-0.5, u0_.values, out.u.values);
    kernels::axpy(-0.5, phi0_.values, out.phi.values);
    kernels::axpy(-0.5, theta0_.values, out.theta.values);
    kernels::axpy(-0.5, ul_.values, out.u.values);
    kernels::axpy(-0.5, phil_.values, out.phi.values);
    kernels::axpy(-0.5, thetal_.values, out.theta.values);
  }
  out.magnitude = std::max({max_abs(out.u), max_abs(out.phi), max_abs(out.theta)});
  out.truncation_estimate = std::exp(-p_ * t_last_) * last_max_ / p_;
  if (check && out.truncation_estimate > rel_budget * out.magnitude)
    throw InsufficientHorizon("Laplace truncation estimate " + std::to_string(out.truncation_estimate) +
                              " exceeds budget for p = " + std::to_string(p_) +
                              "; lengthen t_final");
  return out;
}

LaplaceField laplace_transform(const Trajectory& tr, double p, bool check) {
  if (tr.states.empty()) throw ValidationError("empty trajectory");
  if (tr.states.size() > 1 && tr.states.size() != tr.diagnostics.size() + 1)
    throw ValidationError("Laplace transform needs every time level (save_stride 1)");
  const int nn = tr.states.front().u.nodes();
  const int d = tr.states.front().u.components;
  LaplaceField out;
  out.p = p;
  out.u = Field(nn, d);
  out.phi = Field(nn, 1);
  out.theta = Field(nn, 1);
  const double dt = tr.dt;
  const size_t N = tr.states.size();
  for (size_t n = 0; n < N; ++n) {
    const auto& s = tr.states[n];
    double w = std::exp(-p * s.t) * dt;
    if (N > 1 && (n == 0 || n + 1 == N)) w *= 0.5;
    kernels::axpy(w, s.u.values, out.u.values);
    kernels::axpy(w, s.phi.values, out.phi.values);
    kernels::axpy(w, s.theta.values, out.theta.values);
  }
  const auto& last = tr.states.back();
  out.magnitude = std::max({max_abs(out.u), max_abs(out.phi), max_abs(out.theta)});
  out.truncation_estimate = std::exp(-p * last.t) *
                            std::max({max_abs(last.u), max_abs(last.phi), max_abs(last.theta)}) / p;
  if (check && out.truncation_estimate > 1e-6 * out.magnitude)
    throw InsufficientHorizon("Laplace truncation estimate exceeds budget; lengthen t_final");
  return out;
}

double laplace_samples(const std::vector<double>& v, double dt, double p) {
  double s = 0.0;
  const size_t N = v.size();
  for (size_t n = 0; n < N; ++n) {
    double w = std::exp(-p * n * dt) * dt;
    if (N > 1 && (n == 0 || n + 1 == N)) w *= 0.5;
    s += w * v[n];
  }
  return s;
}

IncrementalAction laplace_action(const IncrementalAction& a, double p, double dt, double t_final) {
  const long N = std::lround(t_final / dt);
  auto transform = [&](const Signal& s) {
    std::vector<double> v(static_cast<size_t>(N) + 1);
    for (long n = 0; n <= N; ++n) v[n] = evaluate(s, n * dt);
    return ConstantSignal{laplace_samples(v, dt, p)};
  };
  IncrementalAction r = a;
  for (auto* list : {&r.body_force, &r.charge, &r.heat_source})
    for (auto& l : *list) l.signal = transform(l.signal);
  for (auto& b : r.boundary) b.signal = transform(b.signal);
  return r;
}

namespace {

struct SystemData {
  const LaplaceField* f;
  Field fbar, gbar;
  BoundaryLoads bl;
};

SystemData system_data(const Discretization& D, const LaplaceField& lf, const IncrementalAction& ab) {
  const Grid& g = D.grid();
  if (!ab.charge.empty())
    throw PreconditionFailed("reciprocity identity assumes zero free-charge density");
  for (const auto& b : ab.boundary)
    if (is_essential(b.kind))
      for (double v : b.value)
        if (v != 0.0 && evaluate(b.signal, 0.0) != 0.0)
          throw PreconditionFailed("reciprocity identity assumes homogeneous essential data");
  SystemData s{&lf, load_field(g, ab.body_force, g.dim(), 0.0), load_field(g, ab.heat_source, 1, 0.0),
               {}};
  Field u(g.nodes(), g.dim()), phi(g.nodes(), 1), th(g.nodes(), 1);
  s.bl = apply_boundary_conditions(g, ab, 0.0, u, phi, th);
  return s;
}

}  // namespace

ReciprocityReport reciprocity_residual(const Discretization& D, const LaplaceField& A,
                                       const LaplaceField& B, const IncrementalAction& abarA,
                                       const IncrementalAction& abarB,
                                       const ReciprocityOptions& opt) {
  if (std::abs(A.p - B.p) > 1e-14 * A.p) throw ValidationError("Laplace fields use different p");
  const Grid& g = D.grid();
  const int d = g.dim();
  const double p = A.p;
  const double rho = D.material().rho0;
  const auto& qp = g.corner_quadrature();
  const auto& vw = g.volume_weights();
  const SystemData sa = system_data(D, A, abarA);
  const SystemData sb = system_data(D, B, abarB);
  Field T(g.nodes(), 1);
  for (int k = 0; k < g.nodes(); ++k) T.at(k) = D.theta0(k);

  auto state_of = [&](const LaplaceField& f) {
    IncrementalState s = zero_state(g);
    s.u = f.u;
    s.phi = f.phi;
    s.theta = f.theta;
    return s;
  };
  const IncrementalState xa = state_of(A), xb = state_of(B);

  // Each term is s(X, Y) - s(Y, X) so swapping the systems negates it exactly.
  auto heat_surface = [&](const SystemData& x, const SystemData& y) {
    double v = 0.0;
    for (int k = 0; k < g.nodes(); ++k) v += y.f->theta.at(k) * x.bl.heat_flux.at(k);
    return v / p;
  };
  auto over_q = [&](const IncrementalState& X, const IncrementalState& Y, auto&& fn) {
    double v = 0.0;
    for (const auto& q : qp) {
      const auto& ec = D.node_constants(q.node);
      const QuadFields fx = quad_fields(q, X, d), fy = quad_fields(q, Y, d);
      const auto rx = incremental_constitutive(ec, fx.grad_u, fx.grad_phi, fx.theta, fx.grad_theta);
      const Vec gT = quad_gradient(q, T, d);
      v += q.weight * fn(ec, q, fx, fy, rx, gT, T.at(q.node));
    }
    return v;
  };
  using QF = QuadFields;
  using IR = IncrementalResponse;
  // -(1/p) sum_q w theta'_{,L} Q_L with Q from the first system
  auto hv = [&](const IncrementalState& X, const IncrementalState& Y) {
    return -over_q(X, Y, [&](const EffectiveConstants&, const QuadPoint&, const QF&, const QF& fy,
                             const IR& rx, const Vec&, double) {
             double s = 0.0;
             for (int L = 0; L < d; ++L) s += fy.grad_theta(L) * rx.Q1(L);
             return s;
           }) / p;
  };
  auto pyro = [&](const IncrementalState& X, const IncrementalState& Y) {
    return rho * over_q(X, Y, [&](const EffectiveConstants& ec, const QuadPoint&, const QF& fx,
                                  const QF& fy, const IR&, const Vec&, double t) {
             double s = 0.0;
             for (int L = 0; L < d; ++L) s += ec.P(L) * (-fx.grad_phi(L)) * fy.theta;
             return t * s;
           });
  };
  auto pyro_vol = [&](const IncrementalState& X, const IncrementalState& Y) {
    return rho * over_q(X, Y, [&](const EffectiveConstants& ec, const QuadPoint&, const QF& fx,
                                  const QF& fy, const IR&, const Vec&, double t) {
             double s = 0.0;
             for (int L = 0; L < d; ++L) s += ec.P(L) * fx.theta * (-fy.grad_phi(L));
             return t * s;
           });
  };
  auto elec_grad = [&](const IncrementalState& X, const IncrementalState& Y) {
    return -over_q(X, Y, [&](const EffectiveConstants&, const QuadPoint& q, const QF&, const QF&,
                             const IR& rx, const Vec& gT, double) {
             double s = 0.0;
             for (int L = 0; L < d; ++L) s += gT(L) * rx.Delta1(L);
             return s * Y.phi.at(q.node);
           });
  };
  auto stress_grad = [&](const IncrementalState& X, const IncrementalState& Y) {
    return -over_q(X, Y, [&](const EffectiveConstants&, const QuadPoint& q, const QF&, const QF&,
                             const IR& rx, const Vec& gT, double) {
             double s = 0.0;
             for (int M = 0; M < d; ++M)
               for (int a = 0; a < d; ++a) s += gT(M) * rx.K1(M, a) * Y.u.at(q.node, a);
             return s;
           });
  };
  auto body = [&](const SystemData& x, const SystemData& y) {
    double v = 0.0;
    for (int k = 0; k < g.nodes(); ++k)
      for (int a = 0; a < d; ++a) v += vw[k] * T.at(k) * rho * x.fbar.at(k, a) * y.f->u.at(k, a);
    return v;
  };
  auto traction = [&](const SystemData& x, const SystemData& y) {
    double v = 0.0;
    for (int k = 0; k < g.nodes(); ++k)
      for (int a = 0; a < d; ++a) v += T.at(k) * x.bl.traction.at(k, a) * y.f->u.at(k, a);
    return v;
  };
  const double esign = opt.electric_surface_as_printed ? 1.0 : -1.0;
  auto elec_surface = [&](const SystemData& x, const SystemData& y) {
    double v = 0.0;
    for (int k = 0; k < g.nodes(); ++k) v += T.at(k) * x.bl.surface_charge.at(k) * y.f->phi.at(k);
    return esign * v;
  };
  auto source = [&](const SystemData& x, const SystemData& y) {
    double v = 0.0;
    for (int k = 0; k < g.nodes(); ++k) v += vw[k] * x.f->theta.at(k) * y.gbar.at(k);
    return rho * v / p;
  };

  ReciprocityReport r;
  r.p = p;
  auto add = [&](const std::string& name, double ab, double ba) { r.terms.emplace_back(name, ab - ba); };
  add("heat_surface", heat_surface(sa, sb), heat_surface(sb, sa));
  add("heat_volume", hv(xa, xb), hv(xb, xa));
  add("pyroelectric", pyro(xa, xb), pyro(xb, xa));
  add("body_force", body(sa, sb), body(sb, sa));
  add("traction_surface", traction(sa, sb), traction(sb, sa));
  add("electric_surface", elec_surface(sa, sb), elec_surface(sb, sa));
  add("electric_gradient_theta", elec_grad(xa, xb), elec_grad(xb, xa));
  add("pyro_volume", pyro_vol(xa, xb), pyro_vol(xb, xa));
  add("stress_gradient_theta", stress_grad(xa, xb), stress_grad(xb, xa));
  add("source", source(sa, sb), source(sb, sa));
  for (const auto& [name, v] : r.terms) {
    r.total += v;
    r.normalization = std::max(r.normalization, std::abs(v));
  }
  r.relative = r.normalization > 0.0 ? std::abs(r.total) / r.normalization : 0.0;
  return r;
}

double min_observed_order(const std::vector<double>& e) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < e.size(); ++i) m = std::min(m, std::log2(e[i] / e[i + 1]));
  return e.size() < 2 ? 0.0 : m;
}

}  // namespace itee
