#include "itee/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "itee/errors.hpp"

namespace itee {

namespace {

bool homogeneous(const IncrementalAction& a) {
  auto zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  };
  for (const auto* l : {&a.body_force, &a.charge, &a.heat_source})
    for (const auto& x : *l)
      if (!zero(x.amplitude)) return false;
  for (const auto& b : a.boundary)
    if (!zero(b.value)) return false;
  return true;
}

IntegratorSpec every_step(IntegratorSpec s) {
  s.save_stride = 1;
  return s;
}

}  // namespace

Scenario refined(const Scenario& s, int k, bool refine_grid, bool refine_dt) {
  Scenario r = s;
  const int f = 1 << k;
  if (refine_grid)
    for (int a = 0; a < s.grid.dim; ++a) r.grid.n[a] = (s.grid.n[a] - 1) * f + 1;
  if (refine_dt) r.integrator.dt = s.integrator.dt / f;
  return r;
}

EnergyStudy energy_study(const Config& c, int levels) {
  if (levels < 1) throw ValidationError("levels must be at least 1");
  const Scenario& sc = c.scenario;
  const auto disc = make_discretization(sc);
  EnergyStudy r;
  r.homogeneous = homogeneous(sc.action);
  Trajectory finest;
  for (int k = 0; k < levels; ++k) {
    const IntegratorSpec spec = every_step(refined(sc, k, false, true).integrator);
    Trajectory tr = run_simulation(disc, sc.action, sc.initial, spec);
    EnergyBalanceReport rep = energy_balance_residual(*disc, tr, sc.action);
    r.dt.push_back(spec.dt);
    r.residual_norm.push_back(rep.norm);
    if (k + 1 == levels) {
      r.finest = std::move(rep);
      finest = std::move(tr);
    }
  }
  r.min_order = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < levels; ++k) {
    r.order.push_back(std::log2(r.residual_norm[k] / r.residual_norm[k + 1]));
    r.min_order = std::min(r.min_order, r.order.back());
  }
  if (r.order.empty()) r.min_order = 0.0;

  const auto& L = r.finest.ledger;
  const double t0 = std::abs(L.front().total());
  double inc = -std::numeric_limits<double>::infinity();
  for (size_t n = 1; n < L.size(); ++n) inc = std::max(inc, L[n].total() - L[n - 1].total());
  r.max_increase = L.size() < 2 ? 0.0 : (t0 > 0.0 ? inc / t0 : inc);

  const auto& ec = disc->node_constants(0);
  const size_t ns = finest.states.size();
  const size_t samples = std::min<size_t>(20, ns);
  for (size_t i = 0; i < samples; ++i) {
    const size_t idx = samples == 1 ? 0 : i * (ns - 1) / (samples - 1);
    const auto d = dissipation_identity(disc->grid(), ec, disc->bias().theta_c, finest.states[idx]);
    r.dissipation_max_residual = std::max(r.dissipation_max_residual, d.residual);
    r.dissipation_ok = r.dissipation_ok && d.identity_ok && (!d.fourier_model || d.sign_ok);
    ++r.dissipation_samples;
  }
  double scale = 0.0;
  for (const auto& l : L)
    scale = std::max({scale, std::abs(l.total()) / std::max(sc.integrator.t_final, sc.integrator.dt), std::abs(l.rhs_power),
                      std::abs(l.dissipation())});
  r.exact = true;
  for (double v : r.residual_norm) r.exact = r.exact && v <= 1e-10 * scale;
  const bool order_ok = levels < 2 || r.exact || r.min_order >= 0.9;
  const bool lyapunov_ok = !r.homogeneous || r.max_increase <= 1e-10;
  r.pass = order_ok && lyapunov_ok && r.dissipation_ok;
  return r;
}

UniquenessStudy uniqueness_study(const Config& c) {
  const Scenario& sc = c.scenario;
  InitialData ic2 = sc.initial;
  const auto& p = c.verification.perturbation;
  ic2.u.insert(ic2.u.end(), p.u.begin(), p.u.end());
  ic2.v.insert(ic2.v.end(), p.v.begin(), p.v.end());
  ic2.theta.insert(ic2.theta.end(), p.theta.begin(), p.theta.end());
  UniquenessStudy r;
  r.report = uniqueness_experiment(make_discretization(sc), sc.action, sc.initial, ic2,
                                   sc.integrator);
  r.pass = r.report.preconditions_hold && r.report.monotone;
  return r;
}

HamiltonStudy hamilton_study(const Config& c, unsigned seed) {
  const Scenario& sc = c.scenario;
  const auto disc = make_discretization(sc);
  const int d = disc->dim();
  const Vec& inj = c.verification.kappa1_injection;
  HamiltonStudy r;
  for (int a = 0; a < d; ++a) r.injection = r.injection || inj(a) != 0.0;

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  EffectiveConstants ec = disc->node_constants(0);
  for (int a = 0; a < d; ++a) ec.kap_1(a) += inj(a);
  std::vector<LocalIncrement> states(50);
  for (auto& s : states) {
    for (int i = 0; i < d; ++i) {
      s.grad_phi(i) = U(gen);
      s.grad_theta(i) = U(gen);
      for (int j = 0; j < d; ++j) s.grad_u(i, j) = U(gen);
    }
    s.theta = U(gen);
  }
  r.density = hamilton_density_checks(ec, states);

  const Trajectory tr = run_simulation(disc, sc.action, sc.initial, every_step(sc.integrator));
  const auto fourier = make_variational_context(disc);
  VariationalContext injected;
  if (r.injection) injected = make_variational_context(disc, inj);
  const size_t n = tr.states.size() - 1;
  std::vector<size_t> at;
  for (size_t k : {n / 4, n / 2, n})
    if (k >= 1 && std::find(at.begin(), at.end(), k) == at.end()) at.push_back(k);

  r.min_perturbed_field_norm = std::numeric_limits<double>::infinity();
  r.min_injected_psi_norm = std::numeric_limits<double>::infinity();
  const double dt = sc.integrator.dt;
  for (size_t k : at) {
    const auto& s0 = tr.states[k - 1];
    const auto& s1 = tr.states[k];
    HamiltonCheck h;
    h.t = s1.t;
    h.fourier = hamilton_variation_residual(fourier, s0, s1, dt, sc.action);
    IncrementalState p = s1;
    double scale = 1e-12;
    for (double v : s1.u.values) scale = std::max(scale, std::abs(v));
    for (double& v : p.u.values) v += 1e-2 * scale * U(gen);
    for (double& v : p.phi.values) v += 1e-2 * scale * U(gen);
    h.perturbed = hamilton_variation_residual(fourier, s0, p, dt, sc.action);
    r.max_el_vs_field = std::max({r.max_el_vs_field, h.fourier.el_vs_field, h.perturbed.el_vs_field});
    r.max_field_norm = std::max(r.max_field_norm, h.fourier.field_norm);
    r.max_psi_norm = std::max(r.max_psi_norm, h.fourier.psi_norm);
    r.max_heat_norm = std::max(r.max_heat_norm, h.fourier.heat_norm);
    r.min_perturbed_field_norm = std::min(r.min_perturbed_field_norm, h.perturbed.field_norm);
    if (r.injection) {
      h.injected = hamilton_variation_residual(injected, s0, s1, dt, sc.action);
      r.max_defect_error = std::max(r.max_defect_error, h.injected.defect_error);
      r.min_injected_psi_norm = std::min(r.min_injected_psi_norm, h.injected.psi_norm);
    }
    r.checks.push_back(std::move(h));
  }
  if (!r.injection) r.min_injected_psi_norm = 0.0;
  r.pass = r.density.pass && !r.checks.empty() && r.max_el_vs_field <= 1e-10 &&
           r.max_field_norm <= 1e-10 && r.max_psi_norm <= 1e-10 && r.max_heat_norm <= 1e-10 &&
           r.min_perturbed_field_norm > 1e-8 &&
           (!r.injection || (r.max_defect_error <= 1e-10 && r.min_injected_psi_norm > 1e-8));
  return r;
}

ReciprocityStudy reciprocity_study(const Config& c, const std::vector<double>& p, int levels,
                                   bool electric_surface_as_printed) {
  if (levels < 1) throw ValidationError("levels must be at least 1");
  if (p.empty()) throw ValidationError("at least one Laplace parameter is needed");
  ReciprocityStudy r;
  for (double x : p) {
    if (!(x > 0.0)) throw ValidationError("Laplace parameters must be positive");
    r.p.push_back(x / c.verification.t_char);
  }
  const IncrementalAction& A = c.scenario.action;
  const IncrementalAction& B = c.verification.loading_b;
  ReciprocityOptions opt;
  opt.electric_surface_as_printed = electric_surface_as_printed;
  for (int k = 0; k < levels; ++k) {
    const Scenario sc = refined(c.scenario, k, true, true);
    const auto disc = make_discretization(sc);
    IntegratorSpec spec = sc.integrator;
    spec.save_stride = std::numeric_limits<int>::max();
    const double dt = spec.dt;
    const double T = std::lround(spec.t_final / dt) * dt;
    std::vector<LaplaceAccumulator> la, lb;
    for (double q : r.p) {
      la.emplace_back(disc->grid(), q, dt);
      lb.emplace_back(disc->grid(), q, dt);
    }
    run_simulation(disc, A, sc.initial, spec, [&](const IncrementalState& s) {
      for (auto& x : la) x.add(s);
    });
    run_simulation(disc, B, sc.initial, spec, [&](const IncrementalState& s) {
      for (auto& x : lb) x.add(s);
    });
    ReciprocityLevel lv;
    lv.nodes = disc->grid().nodes();
    lv.dt = dt;
    for (size_t i = 0; i < r.p.size(); ++i) {
      const LaplaceField fa = la[i].finish(), fb = lb[i].finish();
      const IncrementalAction abarA = laplace_action(A, r.p[i], dt, T);
      const IncrementalAction abarB = laplace_action(B, r.p[i], dt, T);
      ReciprocityReport ab = reciprocity_residual(*disc, fa, fb, abarA, abarB, opt);
      const ReciprocityReport ba = reciprocity_residual(*disc, fb, fa, abarB, abarA, opt);
      for (size_t t = 0; t < ab.terms.size(); ++t)
        lv.max_swap_error =
            std::max(lv.max_swap_error, std::abs(ab.terms[t].second + ba.terms[t].second));
      const ReciprocityReport aa = reciprocity_residual(*disc, fa, fa, abarA, abarA, opt);
      lv.max_identical = std::max(lv.max_identical, std::abs(aa.total));
      r.max_relative = std::max(r.max_relative, ab.relative);
      lv.reports.push_back(std::move(ab));
    }
    if (!r.levels.empty())
      for (size_t i = 0; i < r.p.size(); ++i)
        r.decreasing = r.decreasing && lv.reports[i].relative < r.levels.back().reports[i].relative;
    r.levels.push_back(std::move(lv));
  }
  bool exact = true;
  for (const auto& lv : r.levels) exact = exact && lv.max_swap_error == 0.0 && lv.max_identical == 0.0;
  r.pass = r.max_relative <= 1e-3 && r.decreasing && exact;
  return r;
}

ConvergenceStudy convergence_study(const Config& c, int levels, double min_ratio) {
  if (levels < 3) throw ValidationError("a convergence study needs at least 3 levels");
  const Scenario& sc = c.scenario;
  const auto disc = make_discretization(sc);
  ConvergenceStudy r;
  std::vector<Field> finals;
  for (int k = 0; k < levels; ++k) {
    IntegratorSpec spec = refined(sc, k, false, true).integrator;
    spec.save_stride = std::numeric_limits<int>::max();
    const Trajectory tr = run_simulation(disc, sc.action, sc.initial, spec);
    r.dt.push_back(spec.dt);
    finals.push_back(tr.states.back().u);
  }
  for (int k = 0; k + 1 < levels; ++k) {
    double m = 0.0;
    for (size_t i = 0; i < finals[k].values.size(); ++i)
      m = std::max(m, std::abs(finals[k].values[i] - finals[k + 1].values[i]));
    r.difference.push_back(m);
  }
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k + 1 < r.difference.size(); ++k) {
    r.ratio.push_back(r.difference[k] / r.difference[k + 1]);
    r.min_ratio = std::min(r.min_ratio, r.ratio.back());
  }
  r.pass = r.min_ratio >= min_ratio;
  return r;
}

}  // namespace itee
