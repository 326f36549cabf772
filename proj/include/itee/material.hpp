#pragma once

// Nonlinear thermoelectroelastic material: polynomial free energy
// psi(E, W, theta), its analytic partial derivatives, the resulting
// first Piola-Kirchhoff stress / reference electric displacement / entropy,
// and a Fourier-type heat-flux law.
//
// Free energy (per unit reference volume):
//   rho0*psi = 1/2 c2:E:E + 1/6 c3:E:E:E - e_{MKL} W_M E_{KL} - 1/2 chi W.W
//              - lam:E tau - rho0 p.W tau - rho0 a / (2 theta_ref) tau^2,
//   tau = theta - theta_ref.

#include <optional>

#include "itee/tensor.hpp"

namespace itee {

struct MaterialModel {
  int dim = 1;
  double rho0 = 1.0;
  double eps0 = 1.0;
  double theta_ref = 1.0;
  Tensor4 c2;                 // c_{KLMN}
  std::optional<Tensor6> c3;  // c_{KLMNPQ}, fully pair- and minor-symmetric
  Tensor3 e_piezo;            // e_{MKL}, symmetric in (K, L)
  Mat chi_diel;               // chi_{MN}
  Mat lam_thermo;             // lambda_{KL}
  Vec p_pyro;                 // p_M
  double a_heat = 1.0;
  Mat kappa_cond;             // kappa_{MN}, SPD

  /// Throws InvalidMaterial / NotPositiveDefinite when an invariant fails.
  void validate() const;

  bool operator==(const MaterialModel&) const = default;
};

/// Kinematic and thermal arguments of psi and Q at a material point.
struct LocalThermoState {
  Mat E;          // Green-Lagrange strain E_{MN}
  Vec W;          // reference potential gradient W_M = -phi_{,M}
  double theta;   // absolute temperature
  Vec Theta;      // reference temperature gradient
};

/// First and second partials of psi (per unit mass) at a state.
/// Index conventions: dE(A,B) = d psi / d E_{AB};
/// dEdE(A,B,C,D) = d^2 psi / dE_{AB} dE_{CD}; dEdW(A,B,M) = d^2 psi / dE_{AB} dW_M.
struct PsiDerivatives {
  Mat dE;
  Vec dW;
  double dtheta = 0.0;
  Tensor4 dEdE;
  Tensor3 dEdW;
  Mat dEdtheta;
  Mat dWdW;
  Vec dWdtheta;
  double dthetadtheta = 0.0;
};

double free_energy(const MaterialModel& m, const LocalThermoState& s);

PsiDerivatives psi_derivatives(const MaterialModel& m, const LocalThermoState& s);

struct NonlinearResponse {
  Mat K;         // K(L, i): first Piola-Kirchhoff stress K_{Li}
  Vec Delta;     // reference electric displacement Delta_L
  double eta;    // entropy per unit mass
};

/// Evaluates stress, electric displacement and entropy from the deformation
/// gradient F(i, A) = y_{i,A}, the reference potential gradient W and theta.
/// Includes the vacuum Maxwell stress with present field E_j = X_{L,j} W_L.
NonlinearResponse nonlinear_constitutive(const MaterialModel& m, const Mat& F, const Vec& W,
                                         double theta);

/// Fourier law Q = -kappa * Theta.
Vec heat_flux(const MaterialModel& m, const LocalThermoState& s);

/// Green-Lagrange strain (F^T F - I) / 2.
Mat green_strain(const Mat& F, int d);

}  // namespace itee
