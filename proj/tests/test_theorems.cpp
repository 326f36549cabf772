#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "itee/config.hpp"
#include "itee/errors.hpp"
#include "itee/pipelines.hpp"
#include "itee/theorems.hpp"
#include "oracles.hpp"

using namespace itee;

namespace {

Config load(const std::string& name) { return parse_config(std::string(ITEE_CONFIG_DIR) + "/" + name); }

IncrementalState random_state(std::mt19937_64& rng, const Grid& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  IncrementalState s = zero_state(g);
  for (auto* f : {&s.u, &s.v, &s.phi, &s.theta})
    for (double& v : f->values) v = u(rng);
  return s;
}

}  // namespace

TEST_CASE("energy functionals on linear fields") {
  const Grid g(oracle::box(1, 5, 1, 2.0));
  EffectiveConstants ec;
  ec.dim = 1;
  ec.rho0 = 1.5;
  ec.G(0, 0, 0, 0) = 3.0;
  ec.L(0, 0) = 2.0;
  ec.alpha = 0.5;
  ec.P(0) = 0.1;
  ec.kap_2(0, 0) = 0.7;
  IncrementalState s = zero_state(g);
  for (int k = 0; k < g.nodes(); ++k) {
    const double x = g.coord(k)(0);
    s.u.at(k) = 0.1 * x;
    s.v.at(k) = 1.0;
    s.phi.at(k) = -0.2 * x;
    s.theta.at(k) = 0.4;
  }
  const EnergyLedger e = energy_functionals(g, ec, 2.0, s);
  CHECK(e.W_def == doctest::Approx(0.03));
  CHECK(e.K_kin == doctest::Approx(1.5));
  CHECK(e.E_elec == doctest::Approx(0.08));
  CHECK(e.C_coupling == doctest::Approx(0.024));
  CHECK(e.P_heat == doctest::Approx(0.06));
  CHECK(e.chi_theta == 0.0);
  CHECK(e.total() == doctest::Approx(0.03 + 1.5 + 0.08 + 0.024 + 0.06));
}

TEST_CASE("energy balance converges at first order and the closed system does not gain energy") {
  const EnergyStudy coupled = energy_study(load("coupled.yaml"), 3);
  CHECK(coupled.min_order >= 0.9);
  CHECK(coupled.pass);
  const EnergyStudy closed = energy_study(load("closed.yaml"), 1);
  CHECK(closed.homogeneous);
  CHECK(closed.max_increase <= 1e-10);
  CHECK(closed.pass);
}

TEST_CASE("dissipation identity and Fourier sign on random states") {
  std::mt19937_64 rng(41);
  for (int d = 1; d <= 2; ++d) {
    const Grid g(oracle::box(d, 7, 6));
    const MaterialModel m = oracle::random_material(rng, d);
    const BiasState b = build_bias_state(m, oracle::random_bias(rng, d), g);
    const EffectiveConstants ec = effective_constants(m, b, b.theta(Vec{}));
    for (int k = 0; k < 10; ++k) {
      const IncrementalState s = random_state(rng, g);
      const DissipationReport r = dissipation_identity(g, ec, b.theta(Vec{}), s);
      CHECK(r.fourier_model);
      CHECK(r.identity_ok);
      CHECK(r.sign_ok);
      CHECK(r.lhs <= 0.0);
    }
    EffectiveConstants inj = ec;
    inj.kap_1(0) = 0.3;
    CHECK_FALSE(dissipation_identity(g, inj, 1.0, random_state(rng, g)).fourier_model);
  }
}

TEST_CASE("uniqueness: identical data, decay, and failed hypotheses") {
  const Config c = load("uniqueness.yaml");
  const auto disc = make_discretization(c.scenario);
  IntegratorSpec spec = c.scenario.integrator;
  spec.t_final = 0.5;

  const UniquenessReport same =
      uniqueness_experiment(disc, c.scenario.action, c.scenario.initial, c.scenario.initial, spec);
  CHECK(same.max_difference_norm == 0.0);

  const UniquenessStudy s = uniqueness_study(c);
  CHECK(s.report.preconditions_hold);
  CHECK(s.report.monotone);
  CHECK(s.report.final_ratio < 1.0);
  CHECK(s.pass);

  Scenario bad = c.scenario;
  bad.material.p_pyro(0) = 5.0;  // breaks the Ignaczak bound
  const auto dbad = make_discretization(bad);
  const UniquenessReport r =
      uniqueness_experiment(dbad, bad.action, bad.initial, bad.initial, spec);
  CHECK_FALSE(r.preconditions_hold);
  CHECK(r.note.rfind("inconclusive", 0) == 0);
  CHECK_THROWS_AS(uniqueness_experiment(dbad, bad.action, bad.initial, bad.initial, spec, true),
                  PreconditionFailed);
}

TEST_CASE("minimum eigenvalue of G") {
  EffectiveConstants ec;
  ec.dim = 1;
  ec.G(0, 0, 0, 0) = 2.5;
  CHECK(min_eigenvalue_G(ec) == doctest::Approx(2.5));
}

TEST_CASE("enthalpy and dissipation potential reproduce the constitutive relations") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    const Grid g(oracle::box(d, 5, 5));
    const MaterialModel m = oracle::random_material(rng, d);
    const BiasState b = build_bias_state(m, oracle::random_bias(rng, d), g);
    const EffectiveConstants ec = effective_constants(m, b, b.theta(Vec{}));
    std::vector<LocalIncrement> states(25);
    for (auto& s : states) {
      s.theta = u(rng);
      for (int i = 0; i < d; ++i) {
        s.grad_phi(i) = u(rng);
        s.grad_theta(i) = u(rng);
        for (int j = 0; j < d; ++j) s.grad_u(i, j) = u(rng);
      }
    }
    const HamiltonDensityReport r = hamilton_density_checks(ec, states);
    CHECK(r.pass);
    CHECK(r.max_error < 1e-6);
  }
}

TEST_CASE("variational residuals vanish on solutions only for the Fourier model") {
  const Config c = load("coupled.yaml");
  const HamiltonStudy s = hamilton_study(c, 3);
  CHECK(s.density.pass);
  CHECK(s.max_el_vs_field <= 1e-10);
  CHECK(s.max_field_norm <= 1e-10);
  CHECK(s.max_psi_norm <= 1e-10);
  CHECK(s.max_heat_norm <= 1e-10);
  CHECK(s.min_perturbed_field_norm > 1e-8);
  REQUIRE(s.injection);
  CHECK(s.min_injected_psi_norm > 1e-8);
  CHECK(s.max_defect_error <= 1e-10);
  CHECK(s.pass);
}

TEST_CASE("injected kappa_1 defect has the closed form on a uniform gradient") {
  // theta1 = b X on a solution-free state: the predicted defect row is
  // -sum_q w kappa_1 b N_i. Summed over the rows that are not held by the
  // essential temperature at X = 0, this is -kappa_1 b (|body| - h / 2).
  const Config c = load("coupled.yaml");
  const auto disc = make_discretization(c.scenario);
  Vec k1;
  k1(0) = 0.3;
  const VariationalContext ctx = make_variational_context(disc, k1);
  IncrementalState s0 = zero_state(disc->grid());
  for (int k = 0; k < disc->grid().nodes(); ++k) s0.theta.at(k) = 0.2 * disc->grid().coord(k)(0);
  IncrementalState s1 = s0;
  s1.t = 0.01;
  const HamiltonVariationReport r = hamilton_variation_residual(ctx, s0, s1, 0.01, IncrementalAction{});
  CHECK(r.predicted_defect.sum() == doctest::Approx(-0.3 * 0.2 * (1.0 - 0.005)).epsilon(1e-12));
  CHECK((r.defect - r.predicted_defect).cwiseAbs().maxCoeff() <= 1e-10 * r.predicted_defect.cwiseAbs().maxCoeff());
}

TEST_CASE("trapezoidal Laplace transform of known signals") {
  const double dt = 1e-3, T = 40.0;
  const int n = static_cast<int>(std::round(T / dt));
  std::vector<double> one(n + 1, 1.0), ex(n + 1);
  for (int i = 0; i <= n; ++i) ex[i] = std::exp(-0.5 * i * dt);
  for (double p : {1.0, 2.0, 4.0}) {
    CHECK(laplace_samples(one, dt, p) == doctest::Approx(1.0 / p).epsilon(1e-6));
    CHECK(laplace_samples(ex, dt, p) == doctest::Approx(1.0 / (p + 0.5)).epsilon(1e-6));
  }
}

TEST_CASE("Laplace accumulator agrees with the sampled transform and guards the horizon") {
  const Grid g(oracle::box(1, 3));
  const double dt = 0.01;
  LaplaceAccumulator acc(g, 2.0, dt), shortacc(g, 2.0, dt);
  std::vector<double> samples;
  for (int i = 0; i <= 2000; ++i) {
    IncrementalState s = zero_state(g, i * dt);
    const double v = std::sin(1.3 * i * dt);
    s.theta.at(1) = v;
    samples.push_back(v);
    acc.add(s);
    if (i <= 100) shortacc.add(s);
  }
  const LaplaceField f = acc.finish();
  CHECK(f.theta.at(1) == doctest::Approx(laplace_samples(samples, dt, 2.0)).epsilon(1e-13));
  CHECK(f.theta.at(1) == doctest::Approx(1.3 / (4.0 + 1.69)).epsilon(1e-4));
  CHECK_THROWS_AS(shortacc.finish(), InsufficientHorizon);
}

TEST_CASE("transformed actions") {
  IncrementalAction a;
  a.body_force.push_back({UniformProfile{}, {2.0}, ConstantSignal{1.0}});
  const IncrementalAction t = laplace_action(a, 2.0, 1e-3, 40.0);
  const Grid g(oracle::box(1, 3));
  CHECK(load_field(g, t.body_force, 1, 0.0).at(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("reciprocity structure: exact swap antisymmetry, zero for identical loadings") {
  Config c = load("bar_two_loads.yaml");
  c.scenario.grid.n[0] = 21;
  c.scenario.integrator.dt = 4e-3;
  const ReciprocityStudy s = reciprocity_study(c, {1.0}, 1);
  REQUIRE(s.levels.size() == 1);
  CHECK(s.levels[0].max_swap_error == 0.0);
  CHECK(s.levels[0].max_identical == 0.0);
  CHECK(s.levels[0].reports[0].terms.size() == 10);
}

TEST_CASE("reciprocity refuses free charge") {
  Config c = load("bar_two_loads.yaml");
  c.scenario.grid.n[0] = 11;
  c.scenario.integrator.dt = 1e-2;
  c.scenario.action.charge.push_back({UniformProfile{}, {0.1}, GaussianPulseSignal{1.0, 2.0, 0.3}});
  CHECK_THROWS_AS(reciprocity_study(c, {1.0}, 1), PreconditionFailed);
}

TEST_CASE("observed order") {
  CHECK(min_observed_order({4.0, 2.0, 1.0}) == doctest::Approx(1.0));
  CHECK(min_observed_order({16.0, 4.0, 2.0}) == doctest::Approx(1.0));
}
