#pragma once

// Static bias state (homogeneous deformation and potential gradient, uniform
// or affine temperature) and the effective incremental constants about it.

#include "itee/fields.hpp"
#include "itee/material.hpp"
#include "itee/tensor.hpp"

namespace itee {

struct BiasSpec {
  Mat F0 = Mat::identity(kMaxDim);  // y_{alpha,L}
  Vec W0;                           // reference potential gradient W_L
  bool theta_uniform = true;
  double theta_c = 1.0;  // theta(X) = theta_c + theta_grad . X
  Vec theta_grad;
  bool operator==(const BiasSpec&) const = default;
};

struct BiasState {
  int dim = 1;
  Mat F0;
  Vec W0;          // reference gradient W_L
  Vec W0_spatial;  // W_alpha = X_{L,alpha} W_L
  bool theta_uniform = true;
  double theta_c = 1.0;
  Vec theta_grad;

  double J0 = 1.0;
  Mat X0inv;  // X0inv(L, alpha) = X_{L,alpha}
  Mat E0;

  // Responses at X = 0 (spatially constant parts of the bias).
  NonlinearResponse response0;
  Vec Q0;

  // Max-norm equilibrium residuals of the static bias balance laws with zero
  // bias body action: div K, div Delta, div Q. Reported, not enforced.
  double residual_momentum = 0.0;
  double residual_gauss = 0.0;
  double residual_heat = 0.0;

  double theta(const Vec& X) const;
};

/// Throws SingularDeformation (det F0 <= 0) or NonPositiveTemperature when
/// theta(X) <= 0 anywhere on the grid.
BiasState build_bias_state(const MaterialModel& m, const BiasSpec& spec, const Grid& g);

struct EffectiveConstants {
  int dim = 1;
  double rho0 = 1.0;
  Tensor4 G;     // G(K, alpha, L, gamma)
  Tensor3 R;     // R(K, L, gamma): K is the electric index
  Mat Lam;       // Lam(M, alpha)
  Mat L;         // L(M, N)
  Vec P;
  double alpha = 0.0;
  Tensor3 kap_u;  // kappa_{MN alpha}
  Mat kap_E;      // kappa^E_{MN}
  Vec kap_1;      // kappa_M
  Mat kap_2;      // kappa_{MN}
  Tensor4 g_corr;
  Tensor3 r_corr;
  Mat l_corr;
  bool operator==(const EffectiveConstants&) const = default;
};

/// Effective constants at bias temperature theta (the bias is homogeneous in
/// F0 and W0, so only the temperature varies in space).
EffectiveConstants effective_constants(const MaterialModel& m, const BiasState& b, double theta);
EffectiveConstants effective_constants_at(const MaterialModel& m, const BiasState& b,
                                          const Vec& X);

struct SymmetryReport {
  double g_asymmetry = 0.0;  // max |G - G^T(pair)| / ||G||
  double l_asymmetry = 0.0;
  bool pass = true;
};

SymmetryReport check_symmetries(const EffectiveConstants& ec, double tol = 1e-8);

struct IgnaczakReport {
  bool holds = false;
  double lambda_m = 0.0;
  double c = 0.0;
  double gnorm = 0.0;
};

/// |rho0 P| <= rho0 alpha / (2 theta0) * min eig(L). Throws NotPositiveDefinite
/// when L is not positive definite.
IgnaczakReport ignaczak_condition(const EffectiveConstants& ec, double rho0, double theta0);

}  // namespace itee
