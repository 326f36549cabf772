#pragma once

// Incremental constitutive relations, spatial assembly and the monolithic
// implicit time integrator for the coupled momentum / Gauss / heat system.
//
// Unknowns are node-major: node * (dim + 2) + {u_0 .. u_{dim-1}, phi, theta}.
// Spatial discretization: bilinear (linear in 1-D) elements with vertex
// quadrature and lumped mass; see Grid::corner_quadrature.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "itee/bias.hpp"
#include "itee/fields.hpp"
#include "itee/material.hpp"

namespace itee {

struct IncrementalResponse {
  Mat K1;       // K1(M, alpha)
  Vec Delta1;
  double eta1 = 0.0;
  Vec Q1;
};

/// grad_u(gamma, L) = u_{gamma,L}; grad_phi(L) = phi1_{,L}; grad_theta(L) = theta1_{,L}.
IncrementalResponse incremental_constitutive(const EffectiveConstants& ec, const Mat& grad_u,
                                             const Vec& grad_phi, double theta1,
                                             const Vec& grad_theta);

struct IncrementalState {
  double t = 0.0;
  Field u, v, phi, theta;
  bool operator==(const IncrementalState&) const = default;
};

IncrementalState zero_state(const Grid& g, double t = 0.0);

/// Initial data; load signals are evaluated at t = 0. The initial potential is
/// not data: it follows from the Gauss constraint.
struct InitialData {
  std::vector<Load> u, v, theta;
  bool operator==(const InitialData&) const = default;
};

struct IntegratorSpec {
  double dt = 1e-2;
  double t_final = 1.0;
  int save_stride = 1;
  bool gauge_fix = true;
  bool strict_stability = false;  // throw StabilityViolation instead of warning
  bool operator==(const IntegratorSpec&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  MaterialModel material;
  GridSpec grid;
  BiasSpec bias;
  IncrementalAction action;
  InitialData initial;
  IntegratorSpec integrator;
  bool operator==(const Scenario&) const = default;
};

/// Quadrature-point fields evaluated from nodal unknowns.
struct QuadFields {
  Mat grad_u;
  Vec grad_phi;
  Vec grad_theta;
  double theta = 0.0;
};
QuadFields quad_fields(const QuadPoint& q, const IncrementalState& s, int dim);

/// Assembled spatial operators. With A, H, C the global sparse matrices and
/// x the packed unknowns, the semi-discrete system reads
///   momentum rows:  M u'' + A x = f_mech
///   Gauss rows:     A x = f_gauss
///   heat rows:      H x' + C x = f_heat
class Discretization {
 public:
  Discretization(const MaterialModel& m, const BiasState& b, const Grid& g);

  const Grid& grid() const { return grid_; }
  const MaterialModel& material() const { return mat_; }
  const BiasState& bias() const { return bias_; }
  int dim() const { return grid_.dim(); }
  int ndof() const { return grid_.nodes() * (dim() + 2); }
  int dof(int node, int comp) const { return node * (dim() + 2) + comp; }
  int phi_comp() const { return dim(); }
  int theta_comp() const { return dim() + 1; }

  const EffectiveConstants& node_constants(int node) const { return ec_[node]; }
  double theta0(int node) const { return theta0_[node]; }

  const Eigen::SparseMatrix<double>& A() const { return A_; }
  const Eigen::SparseMatrix<double>& H() const { return H_; }
  const Eigen::SparseMatrix<double>& C() const { return C_; }
  const Eigen::VectorXd& mass() const { return mass_; }  // per dof, zero off u

  Eigen::VectorXd pack(const Field& u, const Field& phi, const Field& theta) const;
  Eigen::VectorXd pack(const IncrementalState& s) const { return pack(s.u, s.phi, s.theta); }
  void unpack(const Eigen::VectorXd& x, Field& u, Field& phi, Field& theta) const;
  Eigen::VectorXd pack_velocity(const Field& v) const;

  /// Right-hand side at time t (see class comment). Rows of all physics.
  Eigen::VectorXd loads(const IncrementalAction& a, double t) const;

  /// Essential dof mask per physics-row.
  const std::vector<char>& essential() const { return essential_; }
  bool has_electric_essential() const { return has_electric_essential_; }

  /// c_max = sqrt(max eig of the acoustic block G / rho0) over nodes.
  double max_wave_speed() const;

 private:
  Grid grid_;
  MaterialModel mat_;
  BiasState bias_;
  std::vector<EffectiveConstants> ec_;
  std::vector<double> theta0_;
  Eigen::SparseMatrix<double> A_, H_, C_;
  Eigen::VectorXd mass_;
  std::vector<char> essential_;
  bool has_electric_essential_ = false;
};

struct StepDiagnostics {
  double t = 0.0;
  double gauss_residual = 0.0;  // max |Gauss row residual| / max(1, row scale)
};

struct Trajectory {
  std::string name;
  double dt = 0.0;
  std::vector<IncrementalState> states;  // saved every save_stride steps
  std::vector<StepDiagnostics> diagnostics;  // every step
  bool stability_warning = false;
  double max_gauss_residual = 0.0;
};

class Solver {
 public:
  Solver(std::shared_ptr<const Discretization> disc, const IntegratorSpec& spec);

  const Discretization& disc() const { return *disc_; }
  double dt() const { return dt_; }
  bool stability_warning() const { return stability_warning_; }

  /// State at t = 0 from initial data and essential data; phi from Gauss.
  IncrementalState initial_state(const InitialData& ic, const IncrementalAction& a) const;

  IncrementalState step(const IncrementalState& s, const IncrementalAction& a,
                        StepDiagnostics* diag = nullptr) const;

  /// Gauss-row residual of x at time t (scaled, essential rows skipped).
  double gauss_residual(const IncrementalState& s, const IncrementalAction& a) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  double dt_;
  bool pin_phi_ = false;
  bool stability_warning_ = false;
  Eigen::SparseMatrix<double> S_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::SparseMatrix<double> G_;  // Gauss block on phi dofs
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_gauss_;
  Eigen::SparseMatrix<double> Kuu_half_;  // 0.5 * momentum rows x u cols
};

using StepObserver = std::function<void(const IncrementalState&)>;

/// Runs the scenario; the observer (if any) sees every time level including t = 0.
Trajectory run_simulation(const Scenario& sc, const StepObserver& observer = {});

/// Same, with an already-built discretization (bias and grid taken from it).
Trajectory run_simulation(std::shared_ptr<const Discretization> disc, const IncrementalAction& a,
                          const InitialData& ic, const IntegratorSpec& spec,
                          const StepObserver& observer = {});

std::shared_ptr<const Discretization> make_discretization(const Scenario& sc);

}  // namespace itee
