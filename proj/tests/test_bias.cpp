#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "itee/bias.hpp"
#include "itee/errors.hpp"
#include "itee/solver.hpp"
#include "oracles.hpp"

using namespace itee;

namespace {

Grid unit_grid(int d) { return Grid(oracle::box(d, 5, 5)); }

double max_rel(const IncrementalResponse& a, const IncrementalResponse& b, int d) {
  double num = 0.0, den = 1e-300;
  for (int M = 0; M < d; ++M) {
    num = std::max(num, std::abs(a.Delta1(M) - b.Delta1(M)));
    den = std::max(den, std::abs(b.Delta1(M)));
    for (int c = 0; c < d; ++c) {
      num = std::max(num, std::abs(a.K1(M, c) - b.K1(M, c)));
      den = std::max(den, std::abs(b.K1(M, c)));
    }
  }
  num = std::max(num, std::abs(a.eta1 - b.eta1));
  den = std::max(den, std::abs(b.eta1));
  return num / den;
}

}  // namespace

TEST_CASE("effective constants linearize the nonlinear response") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    const Grid g = unit_grid(d);
    for (int k = 0; k < 25; ++k) {
      const MaterialModel m = oracle::random_material(rng, d);
      const BiasState b = build_bias_state(m, oracle::random_bias(rng, d), g);
      const double th0 = b.theta(Vec{});
      const EffectiveConstants ec = effective_constants(m, b, th0);
      Mat gu;
      Vec gphi;
      for (int i = 0; i < d; ++i) {
        gphi(i) = u(rng);
        for (int j = 0; j < d; ++j) gu(i, j) = u(rng);
      }
      const double th = u(rng);
      const auto an = incremental_constitutive(ec, gu, gphi, th, Vec{});
      const auto fd = oracle::fd_increment(m, b, th0, gu, gphi, th);
      CHECK(max_rel(an, fd, d) < 1e-7);
    }
  }
}

TEST_CASE("G has the pair symmetry and L is symmetric") {
  std::mt19937_64 rng(22);
  for (int d = 1; d <= 2; ++d) {
    const Grid g = unit_grid(d);
    for (int k = 0; k < 25; ++k) {
      const MaterialModel m = oracle::random_material(rng, d);
      const BiasState b = build_bias_state(m, oracle::random_bias(rng, d), g);
      const SymmetryReport r = check_symmetries(effective_constants(m, b, b.theta(Vec{})));
      CHECK(r.pass);
      CHECK(r.g_asymmetry < 1e-12);
      CHECK(r.l_asymmetry < 1e-12);
    }
  }
}

TEST_CASE("natural state reduces to the classical moduli") {
  std::mt19937_64 rng(23);
  for (int d = 1; d <= 2; ++d) {
    const MaterialModel m = oracle::random_material(rng, d);
    BiasSpec spec;
    spec.theta_c = m.theta_ref;
    const BiasState b = build_bias_state(m, spec, unit_grid(d));
    const EffectiveConstants ec = effective_constants(m, b, m.theta_ref);
    CHECK(frobenius(ec.g_corr.a) == 0.0);
    CHECK(frobenius(ec.r_corr.a) == 0.0);
    for (int M = 0; M < d; ++M) {
      CHECK(ec.P(M) == doctest::Approx(m.p_pyro(M)).epsilon(1e-14));
      for (int N = 0; N < d; ++N) {
        CHECK(ec.l_corr(M, N) == (M == N ? m.eps0 : 0.0));
        CHECK(ec.L(M, N) == doctest::Approx(m.chi_diel(M, N) + (M == N ? m.eps0 : 0.0)).epsilon(1e-14));
        CHECK(ec.Lam(M, N) == doctest::Approx(m.lam_thermo(M, N) / m.rho0).epsilon(1e-14));
        for (int c = 0; c < d; ++c) {
          CHECK(ec.R(M, N, c) == doctest::Approx(m.e_piezo(M, N, c)).epsilon(1e-14));
          for (int L = 0; L < d; ++L)
            CHECK(ec.G(M, N, L, c) == doctest::Approx(m.c2(M, N, L, c)).epsilon(1e-14));
        }
      }
    }
    CHECK(ec.alpha == doctest::Approx(m.a_heat / m.theta_ref).epsilon(1e-14));
  }
}

TEST_CASE("homogeneous bias is in equilibrium") {
  std::mt19937_64 rng(24);
  const MaterialModel m = oracle::random_material(rng, 2);
  const BiasState b = build_bias_state(m, oracle::random_bias(rng, 2), unit_grid(2));
  CHECK(b.residual_momentum < 1e-12);
  CHECK(b.residual_gauss < 1e-12);
  CHECK(b.residual_heat < 1e-12);
}

TEST_CASE("affine bias temperature") {
  std::mt19937_64 rng(25);
  const MaterialModel m = oracle::random_material(rng, 1);
  BiasSpec s;
  s.theta_uniform = false;
  s.theta_c = 1.0;
  s.theta_grad(0) = 0.5;
  const BiasState b = build_bias_state(m, s, unit_grid(1));
  Vec x;
  x(0) = 0.4;
  CHECK(b.theta(x) == doctest::Approx(1.2));
  const EffectiveConstants e1 = effective_constants_at(m, b, x);
  CHECK(e1 == effective_constants(m, b, 1.2));

  s.theta_grad(0) = -2.0;
  CHECK_THROWS_AS(build_bias_state(m, s, unit_grid(1)), NonPositiveTemperature);
}

TEST_CASE("bias validation") {
  std::mt19937_64 rng(26);
  const MaterialModel m = oracle::random_material(rng, 2);
  BiasSpec s;
  s.F0(0, 0) = -1.0;
  CHECK_THROWS_AS(build_bias_state(m, s, unit_grid(2)), SingularDeformation);
  BiasSpec t;
  t.theta_c = 0.0;
  CHECK_THROWS_AS(build_bias_state(m, t, unit_grid(2)), NonPositiveTemperature);
}

TEST_CASE("Ignaczak condition on a hand example") {
  EffectiveConstants ec;
  ec.dim = 2;
  ec.L(0, 0) = 2.0;
  ec.L(1, 1) = 3.0;
  ec.alpha = 4.0;
  ec.P(0) = 0.3;
  ec.P(1) = 0.4;
  // c = rho0 alpha / (2 theta0) = 1, lambda_m = 2, |rho0 P| = 0.5
  const IgnaczakReport r = ignaczak_condition(ec, 1.0, 2.0);
  CHECK(r.c == doctest::Approx(1.0));
  CHECK(r.lambda_m == doctest::Approx(2.0));
  CHECK(r.gnorm == doctest::Approx(0.5));
  CHECK(r.holds);
  ec.P(0) = 3.0;
  CHECK_FALSE(ignaczak_condition(ec, 1.0, 2.0).holds);
  ec.L(0, 0) = -1.0;
  CHECK_THROWS_AS(ignaczak_condition(ec, 1.0, 2.0), NotPositiveDefinite);
}
