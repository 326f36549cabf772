#include "itee/material.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itee/errors.hpp"

namespace itee {

namespace {

constexpr double kSymTol = 1e-12;

bool close(double a, double b, double scale) { return std::abs(a - b) <= kSymTol * scale; }

void require_positive_temperature(double theta) {
  if (!(theta > 0.0)) {
    throw NonPositiveTemperature("absolute temperature must be positive, got " +
                                 std::to_string(theta));
  }
}

}  // namespace

void MaterialModel::validate() const {
  if (dim != 1 && dim != 2) throw InvalidMaterial("dimension must be 1 or 2");
  if (!(rho0 > 0.0)) throw InvalidMaterial("rho0 must be positive");
  if (!(theta_ref > 0.0)) throw InvalidMaterial("theta_ref must be positive");
  if (!(a_heat > 0.0)) throw InvalidMaterial("a_heat must be positive");
  if (!(eps0 > 0.0)) throw InvalidMaterial("eps0 must be positive");
  const int d = dim;
  const double cs = std::max(1.0, frobenius(c2.a));
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          const double v = c2(k, l, m, n);
          if (!close(v, c2(l, k, m, n), cs) || !close(v, c2(k, l, n, m), cs) ||
              !close(v, c2(m, n, k, l), cs)) {
            throw InvalidMaterial("c2 lacks minor/major symmetry");
          }
        }
  if (c3) {
    const auto& c = *c3;
    const double s = std::max(1.0, frobenius(c.a));
    for (int i = 0; i < 64; ++i) {
      int idx[6];
      int r = i;
      for (int q = 5; q >= 0; --q) {
        idx[q] = r % kMaxDim;
        r /= kMaxDim;
      }
      bool in_range = true;
      for (int q : idx) in_range = in_range && q < d;
      if (!in_range) continue;
      const int a = idx[0], b = idx[1], cc = idx[2], dd = idx[3], e = idx[4], f = idx[5];
      const double v = c(a, b, cc, dd, e, f);
      if (!close(v, c(b, a, cc, dd, e, f), s) || !close(v, c(cc, dd, a, b, e, f), s) ||
          !close(v, c(e, f, cc, dd, a, b), s)) {
        throw InvalidMaterial("c3 lacks pair/minor symmetry");
      }
    }
  }
  const double es = std::max(1.0, frobenius(e_piezo.a));
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        if (!close(e_piezo(m, k, l), e_piezo(m, l, k), es))
          throw InvalidMaterial("e_piezo must be symmetric in its last two indices");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (!close(chi_diel(i, j), chi_diel(j, i), std::max(1.0, frobenius(chi_diel.a))))
        throw InvalidMaterial("chi_diel must be symmetric");
      if (!close(lam_thermo(i, j), lam_thermo(j, i), std::max(1.0, frobenius(lam_thermo.a))))
        throw InvalidMaterial("lam_thermo must be symmetric");
      if (!close(kappa_cond(i, j), kappa_cond(j, i), std::max(1.0, frobenius(kappa_cond.a))))
        throw InvalidMaterial("kappa_cond must be symmetric");
    }
  if (!(sym_eigenvalues(kappa_cond, d)(0) > 0.0))
    throw NotPositiveDefinite("kappa_cond must be positive definite");
}

Mat green_strain(const Mat& F, int d) {
  Mat E;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += F(j, m) * F(j, n);
      E(m, n) = 0.5 * (s - (m == n ? 1.0 : 0.0));
    }
  return E;
}

double free_energy(const MaterialModel& m, const LocalThermoState& s) {
  require_positive_temperature(s.theta);
  const int d = m.dim;
  const double tau = s.theta - m.theta_ref;
  double e2 = 0.0, e3 = 0.0, piezo = 0.0, diel = 0.0, thermo = 0.0, pyro = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      thermo += m.lam_thermo(k, l) * s.E(k, l);
      for (int p = 0; p < d; ++p) piezo += m.e_piezo(p, k, l) * s.W(p) * s.E(k, l);
      for (int mm = 0; mm < d; ++mm)
        for (int n = 0; n < d; ++n) {
          e2 += m.c2(k, l, mm, n) * s.E(k, l) * s.E(mm, n);
          if (m.c3) {
            for (int p = 0; p < d; ++p)
              for (int q = 0; q < d; ++q)
                e3 += (*m.c3)(k, l, mm, n, p, q) * s.E(k, l) * s.E(mm, n) * s.E(p, q);
          }
        }
    }
  for (int i = 0; i < d; ++i) {
    pyro += m.p_pyro(i) * s.W(i);
    for (int j = 0; j < d; ++j) diel += m.chi_diel(i, j) * s.W(i) * s.W(j);
  }
  const double rho_psi = 0.5 * e2 + e3 / 6.0 - piezo - 0.5 * diel - thermo * tau -
                         m.rho0 * pyro * tau - m.rho0 * m.a_heat / (2.0 * m.theta_ref) * tau * tau;
  return rho_psi / m.rho0;
}

PsiDerivatives psi_derivatives(const MaterialModel& m, const LocalThermoState& s) {
  require_positive_temperature(s.theta);
  const int d = m.dim;
  const double tau = s.theta - m.theta_ref;
  const double ir = 1.0 / m.rho0;
  PsiDerivatives out;

  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double v = -m.lam_thermo(a, b) * tau;
      for (int p = 0; p < d; ++p) v -= m.e_piezo(p, a, b) * s.W(p);
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          v += m.c2(a, b, c, e) * s.E(c, e);
          double hess = m.c2(a, b, c, e);
          if (m.c3) {
            for (int p = 0; p < d; ++p)
              for (int q = 0; q < d; ++q) {
                v += 0.5 * (*m.c3)(a, b, c, e, p, q) * s.E(c, e) * s.E(p, q);
                hess += (*m.c3)(a, b, c, e, p, q) * s.E(p, q);
              }
          }
          out.dEdE(a, b, c, e) = hess * ir;
        }
      out.dE(a, b) = v * ir;
      out.dEdtheta(a, b) = -m.lam_thermo(a, b) * ir;
      for (int p = 0; p < d; ++p) out.dEdW(a, b, p) = -m.e_piezo(p, a, b) * ir;
    }

  double dth = -(m.rho0 * m.a_heat / m.theta_ref) * tau;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) dth -= m.lam_thermo(k, l) * s.E(k, l);
  for (int i = 0; i < d; ++i) {
    dth -= m.rho0 * m.p_pyro(i) * s.W(i);
    double w = -m.rho0 * m.p_pyro(i) * tau;
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) w -= m.e_piezo(i, k, l) * s.E(k, l);
    for (int j = 0; j < d; ++j) {
      w -= m.chi_diel(i, j) * s.W(j);
      out.dWdW(i, j) = -m.chi_diel(i, j) * ir;
    }
    out.dW(i) = w * ir;
    out.dWdtheta(i) = -m.p_pyro(i);
  }
  out.dtheta = dth * ir;
  out.dthetadtheta = -m.a_heat / m.theta_ref;
  return out;
}

NonlinearResponse nonlinear_constitutive(const MaterialModel& m, const Mat& F, const Vec& W,
                                         double theta) {
  const int d = m.dim;
  const double J = det(F, d);
  if (!(J > 0.0)) throw SingularDeformation("deformation gradient must have det > 0");
  const Mat X = inverse(F, d);  // X(L, j) = X_{L,j}

  LocalThermoState s{green_strain(F, d), W, theta, Vec{}};
  const PsiDerivatives pd = psi_derivatives(m, s);

  Vec Ef;  // present electric field E_j = X_{L,j} W_L
  double E2 = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < d; ++l) Ef(j) += X(l, j) * W(l);
    E2 += Ef(j) * Ef(j);
  }

  NonlinearResponse r;
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      double k = 0.0;
      for (int a = 0; a < d; ++a) k += F(i, a) * m.rho0 * pd.dE(a, l);
      for (int j = 0; j < d; ++j)
        k += J * X(l, j) * m.eps0 * (Ef(j) * Ef(i) - (i == j ? 0.5 * E2 : 0.0));
      r.K(l, i) = k;
    }
    double dl = -m.rho0 * pd.dW(l);
    for (int j = 0; j < d; ++j) dl += m.eps0 * J * X(l, j) * Ef(j);
    r.Delta(l) = dl;
  }
  r.eta = -pd.dtheta;
  return r;
}

Vec heat_flux(const MaterialModel& m, const LocalThermoState& s) {
  require_positive_temperature(s.theta);
  Vec q;
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) q(i) -= m.kappa_cond(i, j) * s.Theta(j);
  return q;
}

}  // namespace itee
