#pragma once

// YAML scenario configuration: parsing with strict key checking, defaults,
// and a canonical emitter whose output re-parses to the same Config.
//
// Tensor inputs use Voigt notation over the symmetric index pairs
// (11) -> 0, (22) -> 1, (12) -> 2 (only (11) in 1-D):
//   c2: nV x nV matrix, c3: nV x nV x nV array, e_piezo: d x nV,
//   lam_thermo: nV vector; chi_diel and kappa_cond are d x d.

#include <string>
#include <vector>

#include "itee/solver.hpp"

namespace itee {

struct VerificationSpec {
  std::vector<double> p{1.0, 2.0, 4.0};
  double t_char = 1.0;
  int levels = 3;
  unsigned seed = 1;
  InitialData perturbation;  // second initial data of the uniqueness pair
  IncrementalAction loading_b;  // second loading system of the reciprocity pair
  Vec kappa1_injection;
  bool operator==(const VerificationSpec&) const = default;
};

struct Config {
  Scenario scenario;
  VerificationSpec verification;
  bool operator==(const Config&) const = default;
};

/// Throws ParseError (malformed YAML, unknown key, wrong type) or
/// ValidationError / InvalidMaterial / PartitionMismatch for violated
/// invariants. `source` names the input in messages.
Config parse_config_string(const std::string& text, const std::string& source = "<string>");
Config parse_config(const std::string& path);

/// Canonical YAML with every field written out and 17 significant digits.
std::string emit_config(const Config& c);

/// Voigt index of the symmetric pair (K, L) in dimension d.
int voigt(int K, int L, int d);
int voigt_size(int d);

}  // namespace itee
