#pragma once

// Verification pipelines driven by a Config. Each returns a structured result
// with its own pass flag; I/O is left to the caller.

#include <string>
#include <vector>

#include "itee/config.hpp"
#include "itee/theorems.hpp"

namespace itee {

struct EnergyStudy {
  std::vector<double> dt;
  std::vector<double> residual_norm;
  std::vector<double> order;  // between consecutive levels
  double min_order = 0.0;
  bool exact = false;  // every residual at roundoff relative to the energy and power scale
  EnergyBalanceReport finest;
  bool homogeneous = false;  // no loads and no boundary data
  double max_increase = 0.0;  // finest level, per step, relative to the initial total
  int dissipation_samples = 0;
  double dissipation_max_residual = 0.0;
  bool dissipation_ok = true;
  bool pass = false;
};

/// Refines dt by halving `levels - 1` times.
EnergyStudy energy_study(const Config& c, int levels);

struct UniquenessStudy {
  UniquenessReport report;
  bool pass = false;
};

/// Pairs the scenario's initial data with the same data plus the configured
/// perturbation.
UniquenessStudy uniqueness_study(const Config& c);

struct HamiltonCheck {
  double t = 0.0;
  HamiltonVariationReport fourier;
  HamiltonVariationReport perturbed;
  HamiltonVariationReport injected;  // only when a kappa_1 injection is configured
};

struct HamiltonStudy {
  HamiltonDensityReport density;
  std::vector<HamiltonCheck> checks;
  bool injection = false;
  double max_el_vs_field = 0.0;
  double max_field_norm = 0.0;
  double max_psi_norm = 0.0;
  double max_heat_norm = 0.0;
  double min_perturbed_field_norm = 0.0;
  double max_defect_error = 0.0;
  double min_injected_psi_norm = 0.0;
  bool pass = false;
};

HamiltonStudy hamilton_study(const Config& c, unsigned seed);

struct ReciprocityLevel {
  int nodes = 0;
  double dt = 0.0;
  std::vector<ReciprocityReport> reports;  // one per p
  double max_swap_error = 0.0;             // max |term(A,B) + term(B,A)|
  double max_identical = 0.0;              // max |total| with both systems equal
};

struct ReciprocityStudy {
  std::vector<double> p;
  std::vector<ReciprocityLevel> levels;
  bool decreasing = true;
  double max_relative = 0.0;  // over all levels and p
  bool pass = false;
};

/// Level k refines the grid and the time step by 2^k. p values are divided
/// by t_char. electric_surface_as_printed selects the alternative sign.
ReciprocityStudy reciprocity_study(const Config& c, const std::vector<double>& p, int levels,
                                   bool electric_surface_as_printed = false);

struct ConvergenceStudy {
  std::vector<double> dt;
  std::vector<double> difference;  // max nodal |u_k - u_{k+1}| at t_final
  std::vector<double> ratio;  // difference[k] / difference[k + 1]
  double min_ratio = 0.0;
  bool pass = false;
};

/// Time-step self-convergence of the final displacement; pass when every
/// reduction factor is at least min_ratio.
ConvergenceStudy convergence_study(const Config& c, int levels, double min_ratio = 1.8);

/// Scenario with the grid refined by 2^k per axis (node counts (n-1)2^k+1)
/// and dt divided by 2^k when refine_dt is set.
Scenario refined(const Scenario& s, int k, bool refine_grid, bool refine_dt);

}  // namespace itee
