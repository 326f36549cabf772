#include "itee/bias.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itee/errors.hpp"

namespace itee {

double BiasState::theta(const Vec& X) const {
  double t = theta_c;
  if (!theta_uniform)
    for (int a = 0; a < dim; ++a) t += theta_grad(a) * X(a);
  return t;
}

BiasState build_bias_state(const MaterialModel& m, const BiasSpec& spec, const Grid& g) {
  const int d = m.dim;
  if (g.dim() != d) throw ValidationError("grid and material dimensions differ");
  BiasState b;
  b.dim = d;
  for (int i = 0; i < d; ++i) {
    b.W0(i) = spec.W0(i);
    for (int j = 0; j < d; ++j) b.F0(i, j) = spec.F0(i, j);
  }
  b.theta_uniform = spec.theta_uniform;
  b.theta_c = spec.theta_c;
  if (!spec.theta_uniform)
    for (int a = 0; a < d; ++a) b.theta_grad(a) = spec.theta_grad(a);

  b.J0 = det(b.F0, d);
  if (!(b.J0 > 0.0)) throw SingularDeformation("bias deformation gradient must have det > 0");
  b.X0inv = inverse(b.F0, d);
  b.E0 = green_strain(b.F0, d);
  for (int a = 0; a < d; ++a)
    for (int l = 0; l < d; ++l) b.W0_spatial(a) += b.X0inv(l, a) * b.W0(l);

  for (int k = 0; k < g.nodes(); ++k) {
    const double t = b.theta(g.coord(k));
    if (!(t > 0.0))
      throw NonPositiveTemperature("bias temperature must be positive on the grid, got " +
                                   std::to_string(t) + " at node " + std::to_string(k));
  }
  if (!(b.theta(Vec{}) > 0.0))
    throw NonPositiveTemperature("bias temperature must be positive at the origin");

  b.response0 = nonlinear_constitutive(m, b.F0, b.W0, b.theta(Vec{}));
  LocalThermoState s{b.E0, b.W0, b.theta(Vec{}), b.theta_grad};
  b.Q0 = heat_flux(m, s);

  Field K(g.nodes(), d * d), D(g.nodes(), d), Q(g.nodes(), d);
  for (int k = 0; k < g.nodes(); ++k) {
    const auto r = nonlinear_constitutive(m, b.F0, b.W0, b.theta(g.coord(k)));
    // component c*d + L holds K_{L c}, so divergence sums over the reference index.
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) K.at(k, i * d + l) = r.K(l, i);
    for (int l = 0; l < d; ++l) {
      D.at(k, l) = r.Delta(l);
      Q.at(k, l) = b.Q0(l);
    }
  }
  auto maxabs = [](const Field& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::abs(v));
    return s;
  };
  b.residual_momentum = maxabs(divergence(g, K));
  b.residual_gauss = maxabs(divergence(g, D));
  b.residual_heat = maxabs(divergence(g, Q));
  return b;
}

EffectiveConstants effective_constants(const MaterialModel& m, const BiasState& b, double theta) {
  const int d = m.dim;
  const Mat& F = b.F0;
  const Mat& X = b.X0inv;
  const Vec& w = b.W0_spatial;
  const double J = b.J0;
  const double e0 = m.eps0;
  const double rho = m.rho0;
  LocalThermoState s{b.E0, b.W0, theta, Vec{}};
  const PsiDerivatives pd = psi_derivatives(m, s);

  double ww = 0.0;
  for (int a = 0; a < d; ++a) ww += w(a) * w(a);

  EffectiveConstants ec;
  ec.dim = d;
  ec.rho0 = rho;
  for (int K = 0; K < d; ++K)
    for (int a = 0; a < d; ++a)
      for (int L = 0; L < d; ++L)
        for (int c = 0; c < d; ++c) {
          double gc = 0.0;
          for (int be = 0; be < d; ++be) {
            gc += w(a) * w(be) * (X(K, be) * X(L, c) - X(K, c) * X(L, be));
            gc += w(be) * w(c) * (X(K, a) * X(L, be) - X(K, be) * X(L, a));
            gc -= w(a) * w(c) * X(K, be) * X(L, be);
          }
          gc += 0.5 * ww * (X(K, c) * X(L, a) - X(K, a) * X(L, c));
          gc *= e0 * J;
          ec.g_corr(K, a, L, c) = gc;

          double v = (a == c) ? rho * pd.dE(K, L) : 0.0;
          for (int M = 0; M < d; ++M)
            for (int N = 0; N < d; ++N) v += F(a, M) * rho * pd.dEdE(K, M, L, N) * F(c, N);
          ec.G(K, a, L, c) = v + gc;
        }

  for (int K = 0; K < d; ++K)
    for (int L = 0; L < d; ++L)
      for (int c = 0; c < d; ++c) {
        double rc = 0.0;
        for (int a = 0; a < d; ++a)
          rc += w(a) * X(K, a) * X(L, c) - w(a) * X(K, c) * X(L, a) - w(c) * X(K, a) * X(L, a);
        rc *= e0 * J;
        ec.r_corr(K, L, c) = rc;
        double v = 0.0;
        for (int M = 0; M < d; ++M) v -= rho * pd.dEdW(L, M, K) * F(c, M);
        ec.R(K, L, c) = v + rc;
      }

  for (int M = 0; M < d; ++M) {
    for (int c = 0; c < d; ++c) {
      double v = 0.0;
      for (int L = 0; L < d; ++L) v -= pd.dEdtheta(L, M) * F(c, L);
      ec.Lam(M, c) = v;
    }
    for (int N = 0; N < d; ++N) {
      double lc = 0.0;
      for (int a = 0; a < d; ++a) lc += X(M, a) * X(N, a);
      lc *= e0 * J;
      ec.l_corr(M, N) = lc;
      ec.L(M, N) = -rho * pd.dWdW(M, N) + lc;
    }
    ec.P(M) = -pd.dWdtheta(M);
  }
  ec.alpha = -pd.dthetadtheta;

  // Fourier law with constant conductivity: A = B = C = 0, F = -kappa.
  ec.kap_2 = m.kappa_cond;
  return ec;
}

EffectiveConstants effective_constants_at(const MaterialModel& m, const BiasState& b,
                                          const Vec& X) {
  return effective_constants(m, b, b.theta(X));
}

SymmetryReport check_symmetries(const EffectiveConstants& ec, double tol) {
  const int d = ec.dim;
  SymmetryReport r;
  double gmax = 0.0, lmax = 0.0;
  for (int K = 0; K < d; ++K)
    for (int a = 0; a < d; ++a)
      for (int L = 0; L < d; ++L)
        for (int c = 0; c < d; ++c)
          gmax = std::max(gmax, std::abs(ec.G(K, a, L, c) - ec.G(L, c, K, a)));
  for (int M = 0; M < d; ++M)
    for (int N = 0; N < d; ++N) lmax = std::max(lmax, std::abs(ec.L(M, N) - ec.L(N, M)));
  const double gn = frobenius(ec.G.a);
  const double ln = frobenius(ec.L.a);
  r.g_asymmetry = gn > 0.0 ? gmax / gn : gmax;
  r.l_asymmetry = ln > 0.0 ? lmax / ln : lmax;
  r.pass = r.g_asymmetry <= tol && r.l_asymmetry <= tol;
  return r;
}

IgnaczakReport ignaczak_condition(const EffectiveConstants& ec, double rho0, double theta0) {
  if (!(theta0 > 0.0)) throw NonPositiveTemperature("bias temperature must be positive");
  IgnaczakReport r;
  r.lambda_m = sym_eigenvalues(ec.L, ec.dim)(0);
  if (!(r.lambda_m > 0.0)) throw NotPositiveDefinite("effective dielectric tensor L is not positive definite");
  r.c = rho0 * ec.alpha / (2.0 * theta0);
  double g2 = 0.0;
  for (int i = 0; i < ec.dim; ++i) g2 += (rho0 * ec.P(i)) * (rho0 * ec.P(i));
  r.gnorm = std::sqrt(g2);
  r.holds = r.gnorm <= r.c * r.lambda_m;
  return r;
}

}  // namespace itee
