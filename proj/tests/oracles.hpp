#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls the library routine it checks.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "itee/bias.hpp"
#include "itee/material.hpp"
#include "itee/solver.hpp"

namespace oracle {

using namespace itee;

inline int voigt_of(int K, int L, int d) {
  if (d == 1) return 0;
  if (K == L) return K;
  return 2;
}

/// Grid spec with every face of every physics essential.
inline GridSpec box(int d, int nx, int ny = 1, double lx = 1.0, double ly = 1.0) {
  GridSpec s;
  s.dim = d;
  s.n = {nx, d == 2 ? ny : 1};
  s.extents = {lx, ly};
  for (auto& p : s.partitions) p = FacePartition{faces_of(d), {}};
  return s;
}

/// Random material whose quadratic part is positive definite.
inline MaterialModel random_material(std::mt19937_64& rng, int d, bool with_c3 = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int nv = d == 1 ? 1 : 3;
  MaterialModel m;
  m.dim = d;
  m.rho0 = 1.0 + 0.5 * (u(rng) + 1.0);
  m.eps0 = 0.5 + 0.25 * (u(rng) + 1.0);
  m.theta_ref = 1.0 + 0.2 * u(rng);
  m.a_heat = 1.0 + 0.5 * (u(rng) + 1.0);

  Eigen::MatrixXd A(nv, nv);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) A(i, j) = u(rng);
  const Eigen::MatrixXd C = A * A.transpose() + Eigen::MatrixXd::Identity(nv, nv);
  std::vector<double> c3(nv * nv * nv);
  for (int i = 0; i < nv; ++i)
    for (int j = i; j < nv; ++j)
      for (int k = j; k < nv; ++k) {
        const double v = with_c3 ? 0.5 * u(rng) : 0.0;
        const int p[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
        for (const auto& q : p) c3[(q[0] * nv + q[1]) * nv + q[2]] = v;
      }
  Eigen::MatrixXd E(d, nv);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < nv; ++j) E(i, j) = 0.3 * u(rng);
  std::vector<double> lam(nv);
  for (auto& x : lam) x = 0.2 * u(rng);

  for (int K = 0; K < d; ++K)
    for (int L = 0; L < d; ++L) {
      m.lam_thermo(K, L) = lam[voigt_of(K, L, d)];
      for (int M = 0; M < d; ++M) {
        m.e_piezo(M, K, L) = E(M, voigt_of(K, L, d));
        for (int N = 0; N < d; ++N) m.c2(K, L, M, N) = C(voigt_of(K, L, d), voigt_of(M, N, d));
      }
    }
  if (with_c3) {
    Tensor6 t;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            for (int f = 0; f < d; ++f)
              for (int g = 0; g < d; ++g)
                t(a, b, c, e, f, g) =
                    c3[(voigt_of(a, b, d) * nv + voigt_of(c, e, d)) * nv + voigt_of(f, g, d)];
    m.c3 = t;
  }
  Eigen::MatrixXd B(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) B(i, j) = 0.5 * u(rng);
  const Eigen::MatrixXd chi = B * B.transpose() + Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i) {
    m.p_pyro(i) = 0.1 * u(rng);
    for (int j = 0; j < d; ++j) {
      m.chi_diel(i, j) = chi(i, j);
      m.kappa_cond(i, j) = (i == j ? 0.1 : 0.0);
    }
  }
  return m;
}

/// Moderate random bias: F0 = I + 0.1 noise, small W0, uniform temperature.
inline BiasSpec random_bias(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BiasSpec b;
  b.F0 = Mat{};
  for (int i = 0; i < d; ++i) {
    b.W0(i) = 0.3 * u(rng);
    for (int j = 0; j < d; ++j) b.F0(i, j) = (i == j ? 1.0 : 0.0) + 0.1 * u(rng);
  }
  b.theta_uniform = true;
  b.theta_c = 1.0 + 0.2 * u(rng);
  return b;
}

/// Incremental response by central differences of the nonlinear law about the
/// bias: F = F0 + e grad_u, W = W0 - e grad_phi, theta = theta_b + e theta1.
inline IncrementalResponse fd_increment(const MaterialModel& m, const BiasState& b, double theta_b,
                                        const Mat& gu, const Vec& gphi, double th,
                                        double eps = 1e-6) {
  const int d = m.dim;
  auto eval = [&](double s) {
    Mat F = b.F0;
    Vec W = b.W0;
    for (int i = 0; i < d; ++i) {
      W(i) -= s * gphi(i);
      for (int L = 0; L < d; ++L) F(i, L) += s * gu(i, L);
    }
    return nonlinear_constitutive(m, F, W, theta_b + s * th);
  };
  const NonlinearResponse p = eval(eps), q = eval(-eps);
  IncrementalResponse r;
  for (int M = 0; M < d; ++M) {
    r.Delta1(M) = (p.Delta(M) - q.Delta(M)) / (2 * eps);
    for (int a = 0; a < d; ++a) r.K1(M, a) = (p.K(M, a) - q.K(M, a)) / (2 * eps);
  }
  r.eta1 = (p.eta - q.eta) / (2 * eps);
  return r;
}

struct ClassicalOperators {
  Eigen::MatrixXd A, H, C;
};

/// Classical linear thermopiezoelectric weak forms written directly from the
/// material moduli (natural state), on the grid's corner quadrature:
///   momentum: int sigma_{Ma} N_{,M},  sigma = c eps + e^T grad phi - lam theta
///   Gauss:    int D_M N_{,M},         D = e eps - (chi + eps0) grad phi + rho0 p theta
///   entropy:  N theta_ref (lam : eps - rho0 p . grad phi + rho0 a / theta_ref theta)
///   flux:     int kappa grad theta . grad N
inline ClassicalOperators classical_operators(const MaterialModel& m, const Grid& g) {
  const int d = g.dim();
  const int nd = d + 2;
  const int n = g.nodes() * nd;
  ClassicalOperators op{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                        Eigen::MatrixXd::Zero(n, n)};
  auto dofi = [&](int node, int c) { return node * nd + c; };
  for (const auto& q : g.corner_quadrature()) {
    // basis gradients at q: node -> derivative along each axis
    std::vector<std::pair<int, Vec>> grads;
    for (int ax = 0; ax < d; ++ax) {
      for (int s = 0; s < 2; ++s) {
        const int node = s == 0 ? q.plus[ax] : q.minus[ax];
        const double v = (s == 0 ? 1.0 : -1.0) * q.inv_h[ax];
        bool found = false;
        for (auto& [nn, gv] : grads)
          if (nn == node) {
            gv(ax) += v;
            found = true;
          }
        if (!found) {
          Vec gv;
          gv(ax) = v;
          grads.emplace_back(node, gv);
        }
      }
    }
    const double w = q.weight;
    const int tq = dofi(q.node, d + 1);
    for (const auto& [i, gi] : grads) {
      for (const auto& [j, gj] : grads) {
        for (int a = 0; a < d; ++a) {
          for (int c = 0; c < d; ++c) {
            double s = 0.0;
            for (int M = 0; M < d; ++M)
              for (int L = 0; L < d; ++L) s += gi(M) * m.c2(M, a, L, c) * gj(L);
            op.A(dofi(i, a), dofi(j, c)) += w * s;
          }
          double s = 0.0;
          for (int M = 0; M < d; ++M)
            for (int L = 0; L < d; ++L) s += gi(M) * m.e_piezo(L, M, a) * gj(L);
          op.A(dofi(i, a), dofi(j, d)) += w * s;
          op.A(dofi(j, d), dofi(i, a)) += w * s;
        }
        double sd = 0.0, sk = 0.0;
        for (int M = 0; M < d; ++M)
          for (int N = 0; N < d; ++N) {
            sd += gi(M) * (m.chi_diel(M, N) + (M == N ? m.eps0 : 0.0)) * gj(N);
            sk += gi(M) * m.kappa_cond(M, N) * gj(N);
          }
        op.A(dofi(i, d), dofi(j, d)) -= w * sd;
        op.C(dofi(i, d + 1), dofi(j, d + 1)) += w * sk;
      }
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int M = 0; M < d; ++M) s += gi(M) * m.lam_thermo(M, a);
        op.A(dofi(i, a), tq) -= w * s;
        op.H(tq, dofi(i, a)) += w * m.theta_ref * s;
      }
      double sp = 0.0;
      for (int M = 0; M < d; ++M) sp += gi(M) * m.rho0 * m.p_pyro(M);
      op.A(dofi(i, d), tq) += w * sp;
      op.H(tq, dofi(i, d)) -= w * m.theta_ref * sp;
    }
    op.H(tq, tq) += w * m.rho0 * m.a_heat;
  }
  return op;
}

/// Zero crossings of a sampled signal, linearly interpolated.
inline std::vector<double> zero_crossings(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> z;
  for (size_t i = 1; i < y.size(); ++i)
    if ((y[i - 1] < 0.0) != (y[i] < 0.0) && y[i] != y[i - 1])
      z.push_back(t[i - 1] + (t[i] - t[i - 1]) * y[i - 1] / (y[i - 1] - y[i]));
  return z;
}

}  // namespace oracle
