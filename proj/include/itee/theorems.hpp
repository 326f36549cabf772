#pragma once

// Numerical checks of the incremental theorems: energy functionals and the
// modified energy balance, the dissipation identity, uniqueness decay, the
// variational (Hamilton-type) identities, Laplace transforms and the
// reciprocity identity.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "itee/bias.hpp"
#include "itee/fields.hpp"
#include "itee/solver.hpp"

namespace itee {

// ---------------------------------------------------------------------------
// Energy

struct EnergyLedger {
  double t = 0.0;
  double W_def = 0.0;
  double K_kin = 0.0;
  double P_heat = 0.0;
  double E_elec = 0.0;
  double C_coupling = 0.0;
  double chi = 0.0;
  double chi_theta = 0.0;
  double chi_phi = 0.0;
  double chi_u = 0.0;
  double rhs_power = 0.0;
  double residual = 0.0;

  double total() const { return W_def + K_kin + P_heat + E_elec + C_coupling; }
  double total_without_coupling() const { return W_def + K_kin + P_heat + E_elec; }
  double dissipation() const { return chi + chi_theta + chi_phi + chi_u; }
};

/// Instantaneous functionals for spatially constant effective constants and
/// uniform bias temperature theta0. rhs_power and residual are left at 0.
EnergyLedger energy_functionals(const Grid& g, const EffectiveConstants& ec, double theta0,
                                const IncrementalState& s);

/// Throws NonUniformBiasTemperature unless the bias temperature is uniform.
EnergyLedger energy_functionals(const Discretization& d, const IncrementalState& s);

/// Body, boundary and source power at state s. dt is the step used for the
/// centred time derivative of the prescribed surface charge.
double energy_power(const Discretization& d, const IncrementalState& s, const IncrementalAction& a,
                    double dt);

struct EnergyBalanceReport {
  std::vector<EnergyLedger> ledger;  // every time level
  std::vector<double> t;             // interior levels where the residual is defined
  std::vector<double> residual;
  double norm = 0.0;  // root mean square over time
  double max_abs = 0.0;
};

/// Requires states at every step (save_stride 1).
EnergyBalanceReport energy_balance_residual(const Discretization& d, const Trajectory& tr,
                                            const IncrementalAction& a);

struct DissipationReport {
  double lhs = 0.0;  // -(chi + chi_theta + chi_phi + chi_u)
  double rhs = 0.0;  // (1/theta0) int Q1 . Theta1
  double residual = 0.0;
  bool identity_ok = false;
  bool fourier_model = false;
  bool sign_ok = true;  // pointwise Q1 . Theta1 <= 0 (only asserted for the Fourier model)
};

DissipationReport dissipation_identity(const Grid& g, const EffectiveConstants& ec, double theta0,
                                       const IncrementalState& s, double tol = 1e-10);

struct UniquenessReport {
  bool preconditions_hold = false;
  std::string note;
  IgnaczakReport ignaczak;
  double g_min_eig = 0.0;
  std::vector<double> t;
  std::vector<double> total;             // with coupling term
  std::vector<double> total_no_coupling;
  double max_increase = 0.0;             // max step increase / initial total
  double max_increase_no_coupling = 0.0;
  bool monotone = false;
  bool monotone_no_coupling = false;
  double final_ratio = 0.0;
  double max_difference_norm = 0.0;      // max nodal |difference| over the run
};

/// Runs two scenarios that differ only in initial data and studies their
/// difference. With require_preconditions, throws PreconditionFailed when the
/// positivity hypotheses fail; otherwise the report is marked inconclusive.
UniquenessReport uniqueness_experiment(std::shared_ptr<const Discretization> d,
                                       const IncrementalAction& a, const InitialData& ic1,
                                       const InitialData& ic2, const IntegratorSpec& spec,
                                       bool require_preconditions = false,
                                       double tol = 1e-10);

/// Minimum eigenvalue of the symmetrized d^2 x d^2 matrix of G.
double min_eigenvalue_G(const EffectiveConstants& ec);

// ---------------------------------------------------------------------------
// Variational identities

struct LocalIncrement {
  Mat grad_u;  // grad_u(alpha, M) = u_{alpha,M}
  Vec grad_phi;
  double theta = 0.0;
  Vec grad_theta;
};

double density_psi1(const EffectiveConstants& ec, const LocalIncrement& s);
double density_H1(const EffectiveConstants& ec, const LocalIncrement& s);
double density_Gamma(const EffectiveConstants& ec, const LocalIncrement& s);

struct HamiltonDensityReport {
  double err_K = 0.0;      // dH/du_{alpha,M} vs K1
  double err_Delta = 0.0;  // dH/dW vs -Delta1
  double err_eta = 0.0;    // dH/dtheta vs -rho0 eta1
  double err_Q = 0.0;      // dGamma/dtheta_{,M} vs Q1
  double max_error = 0.0;
  bool pass = false;
};

HamiltonDensityReport hamilton_density_checks(const EffectiveConstants& ec,
                                              const std::vector<LocalIncrement>& states,
                                              double tol = 1e-6);

/// Node constants, bias temperature and loads of a discretization, with an
/// optional synthetic kappa_M added to every node (theorem tests only).
struct VariationalContext {
  std::shared_ptr<const Discretization> disc;
  std::vector<EffectiveConstants> ec;
  Vec kap1_injection;
};
VariationalContext make_variational_context(std::shared_ptr<const Discretization> d,
                                            const Vec& kap1_injection = Vec{});

struct HamiltonVariationReport {
  Eigen::VectorXd el_residual;     // discrete Euler-Lagrange residual of Pi (u, phi rows)
  Eigen::VectorXd field_residual;  // assembled momentum / Gauss residual (u, phi rows)
  // Momentum rows at (u^{n+1/2}, phi^{n+1}, theta^{n+1}), Gauss rows at the new
  // level. Norms are max-norms over active rows divided by the largest single
  // row contribution (inertia, stiffness or load).
  double el_vs_field = 0.0;
  double el_norm = 0.0;
  double field_norm = 0.0;

  Eigen::VectorXd psi_variation;   // dPsi_h / dtheta_i, thermal rows
  Eigen::VectorXd heat_residual;   // entropy balance residual with flux data, thermal rows
  Eigen::VectorXd defect;          // psi_variation + heat_residual
  Eigen::VectorXd predicted_defect;  // -sum_q w kappa_M theta_{,M} N_i
  // Thermal norms are relative to the largest entropy-rate, load or defect entry.
  double psi_norm = 0.0;
  double heat_norm = 0.0;
  double defect_error = 0.0;
  std::vector<char> active;        // dof rows included in the norms
};

/// Residuals at the step pair (s0 -> s1) of the time scheme.
HamiltonVariationReport hamilton_variation_residual(const VariationalContext& ctx,
                                                    const IncrementalState& s0,
                                                    const IncrementalState& s1, double dt,
                                                    const IncrementalAction& a);

/// Heat-equation residual computed from quadrature-point fluxes (thermal rows).
Eigen::VectorXd heat_residual(const VariationalContext& ctx, const IncrementalState& s0,
                              const IncrementalState& s1, double dt, const IncrementalAction& a);

// ---------------------------------------------------------------------------
// Laplace transform and reciprocity

struct LaplaceField {
  double p = 1.0;
  Field u, phi, theta;
  double truncation_estimate = 0.0;
  double magnitude = 0.0;
};

/// Online trapezoidal transform over equally spaced time levels.
class LaplaceAccumulator {
 public:
  LaplaceAccumulator(const Grid& g, double p, double dt);
  void add(const IncrementalState& s);
  /// Throws InsufficientHorizon when the truncation estimate exceeds
  /// rel_budget times the transform magnitude (if check is set).
  LaplaceField finish(bool check = true, double rel_budget = 1e-6) const;
  double p() const { return p_; }

 private:
  double p_, dt_;
  int count_ = 0;
  double t_last_ = 0.0;
  Field u_, phi_, theta_;
  Field u0_, phi0_, theta0_;  // weighted first level
  Field ul_, phil_, thetal_;  // weighted last level
  double last_max_ = 0.0;
};

LaplaceField laplace_transform(const Trajectory& tr, double p, bool check = true);

/// Trapezoidal transform of equally spaced samples v[n] = nu(n dt).
double laplace_samples(const std::vector<double>& v, double dt, double p);

/// The action with every signal replaced by its trapezoidal transform over
/// [0, t_final] at step dt (profiles and amplitudes unchanged).
IncrementalAction laplace_action(const IncrementalAction& a, double p, double dt, double t_final);

struct ReciprocityOptions {
  bool electric_surface_as_printed = false;  // alternative sign of the surface-charge pair
};

struct ReciprocityReport {
  double p = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;
  double normalization = 0.0;
  double relative = 0.0;
};

/// Terms of the reciprocity identity between loading systems A and B, from
/// their Laplace fields and transformed actions. Throws PreconditionFailed
/// when a free-charge density is present.
ReciprocityReport reciprocity_residual(const Discretization& d, const LaplaceField& A,
                                       const LaplaceField& B, const IncrementalAction& abarA,
                                       const IncrementalAction& abarB,
                                       const ReciprocityOptions& opt = {});

/// Smallest pairwise order log2(e_k / e_{k+1}) of a dyadic refinement sequence.
double min_observed_order(const std::vector<double>& errors);

}  // namespace itee
