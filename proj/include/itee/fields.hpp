#pragma once

// Structured node-centred grids in 1-D and 2-D, nodal fields, finite
// difference operators, trapezoidal quadrature, boundary partitions and the
// incremental external action (body sources plus boundary data).

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "itee/tensor.hpp"

namespace itee {

enum class Face { Left = 0, Right = 1, Bottom = 2, Top = 3 };
enum class Physics { Mechanical = 0, Electric = 1, Thermal = 2 };
enum class Side { Interior = 0, Essential = 1, Natural = 2 };

std::string to_string(Face f);
std::string to_string(Physics p);
Face face_from_string(const std::string& s);

/// Faces of the box in dimension d: {Left, Right} or {Left, Right, Bottom, Top}.
std::vector<Face> faces_of(int dim);

/// Which faces carry essential (side 1) and natural (side 2) data for one physics.
struct FacePartition {
  std::vector<Face> essential;
  std::vector<Face> natural;
  bool operator==(const FacePartition&) const = default;
};

struct GridSpec {
  int dim = 1;
  std::array<int, 2> n{3, 1};
  std::array<double, 2> extents{1.0, 1.0};
  std::array<FacePartition, 3> partitions;  // indexed by Physics
  bool operator==(const GridSpec&) const = default;
};

/// Point of a boundary face quadrature (trapezoidal along the face).
struct SurfacePoint {
  int node;
  Face face;
  double weight;
  Vec normal;
};

/// Element-corner quadrature point. Every element of the grid contributes one
/// point per corner with weight |element| / 2^d; the gradient at the point is
/// the one-sided edge difference of the element edges meeting at the corner.
/// On bilinear elements this is vertex (trapezoidal) quadrature.
struct QuadPoint {
  int node;
  double weight;
  std::array<int, 2> plus{};
  std::array<int, 2> minus{};
  std::array<double, 2> inv_h{};
};

class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  int dim() const { return spec_.dim; }
  int nodes() const { return nodes_; }
  int n(int axis) const { return spec_.n[axis]; }
  double h(int axis) const { return h_[axis]; }
  double extent(int axis) const { return spec_.extents[axis]; }
  double measure() const;
  const GridSpec& spec() const { return spec_; }

  int node(int i, int j = 0) const { return i + spec_.n[0] * j; }
  std::array<int, 2> index(int node) const;
  Vec coord(int node) const;
  bool on_face(int node, Face f) const;

  Side side(Physics p, int node) const { return labels_[static_cast<int>(p)][node]; }
  Side face_side(Physics p, Face f) const;

  /// Throws ValidationError unless side-1 and side-2 node sets of physics p
  /// are disjoint and their union is the whole boundary.
  void check_partition_axioms(Physics p) const;

  const std::vector<double>& volume_weights() const { return vol_w_; }
  const std::vector<SurfacePoint>& surface() const { return surface_; }
  const std::vector<QuadPoint>& corner_quadrature() const { return quad_; }

 private:
  GridSpec spec_;
  int nodes_ = 0;
  std::array<double, 2> h_{1.0, 1.0};
  std::array<std::vector<Side>, 3> labels_;
  std::vector<double> vol_w_;
  std::vector<SurfacePoint> surface_;
  std::vector<QuadPoint> quad_;
};

/// Node-centred field with `components` values per node, node-major.
struct Field {
  int components = 1;
  std::vector<double> values;

  Field() = default;
  Field(int nodes, int comps) : components(comps), values(static_cast<size_t>(nodes) * comps, 0.0) {}

  double& at(int node, int c = 0) { return values[static_cast<size_t>(node) * components + c]; }
  double at(int node, int c = 0) const {
    return values[static_cast<size_t>(node) * components + c];
  }
  int nodes() const { return components == 0 ? 0 : static_cast<int>(values.size()) / components; }
  bool operator==(const Field&) const = default;
};

Field sample(const Grid& g, int comps, const std::function<double(const Vec&, int)>& f);

/// Gradient: component c of the input becomes components c*dim + axis.
/// Second-order central differences inside, second-order one-sided at the ends.
Field gradient(const Grid& g, const Field& f);

/// Divergence of a field whose components are grouped as c*dim + axis.
Field divergence(const Grid& g, const Field& f);

/// Trapezoidal volume integral, one value per component.
std::vector<double> integrate_volume(const Grid& g, const Field& f);

/// Trapezoidal surface integral over the nodes of physics p labelled `side`.
/// Normals are not applied; use Grid::surface() for flux integrals.
std::vector<double> integrate_surface(const Grid& g, const Field& f, Physics p, Side side);

/// Gradient of a nodal scalar (component c of f) at a corner quadrature point.
inline Vec quad_gradient(const QuadPoint& q, const Field& f, int dim, int c = 0) {
  Vec gv;
  for (int a = 0; a < dim; ++a) gv(a) = (f.at(q.plus[a], c) - f.at(q.minus[a], c)) * q.inv_h[a];
  return gv;
}

// ---------------------------------------------------------------------------
// External incremental action

struct ConstantSignal {
  double value = 1.0;
  bool operator==(const ConstantSignal&) const = default;
};
struct RampSignal {
  double slope = 1.0;
  double start = 0.0;
  bool operator==(const RampSignal&) const = default;
};
struct SineSignal {
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
  bool operator==(const SineSignal&) const = default;
};
struct GaussianPulseSignal {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  bool operator==(const GaussianPulseSignal&) const = default;
};

using Signal = std::variant<ConstantSignal, RampSignal, SineSignal, GaussianPulseSignal>;
double evaluate(const Signal& s, double t);

struct UniformProfile {
  bool operator==(const UniformProfile&) const = default;
};
struct GaussianProfile {
  Vec center;
  double width = 0.1;
  bool operator==(const GaussianProfile&) const = default;
};
/// prod_a sin(mode_a * pi * X_a / extent_a)
struct SineProfile {
  std::array<int, 2> mode{1, 1};
  bool operator==(const SineProfile&) const = default;
};
using Profile = std::variant<UniformProfile, GaussianProfile, SineProfile>;
double evaluate(const Profile& p, const Grid& g, const Vec& X);

/// amplitude[c] * profile(X) * signal(t)
struct Load {
  Profile profile = UniformProfile{};
  std::vector<double> amplitude;
  Signal signal = ConstantSignal{};
  bool operator==(const Load&) const = default;
};

enum class BoundaryKind { Displacement, Traction, Potential, SurfaceCharge, Temperature, HeatFlux };
std::string to_string(BoundaryKind k);
BoundaryKind boundary_kind_from_string(const std::string& s);
Physics physics_of(BoundaryKind k);
bool is_essential(BoundaryKind k);

/// Spatially uniform datum on one face, value[c] * signal(t). Traction is per
/// unit reference area; surface charge follows Delta.N = -charge and heat flux
/// follows Q.N = flux.
struct BoundaryDatum {
  Face face = Face::Left;
  BoundaryKind kind = BoundaryKind::Traction;
  std::vector<double> value;
  Signal signal = ConstantSignal{};
  bool operator==(const BoundaryDatum&) const = default;
};

struct IncrementalAction {
  std::vector<Load> body_force;   // f^1 per unit mass, dim components
  std::vector<Load> charge;       // rho_E^1
  std::vector<Load> heat_source;  // gamma^1 per unit mass
  std::vector<BoundaryDatum> boundary;

  IncrementalAction scaled(double a) const;
  IncrementalAction combined(const IncrementalAction& other) const;
  bool operator==(const IncrementalAction&) const = default;
};

/// Throws PartitionMismatch when a datum sits on a face whose side does not
/// match its kind, or ValidationError on a wrong component count.
void validate_action(const Grid& g, const IncrementalAction& a);

/// Nodal field of a list of loads at time t (sum of the loads).
Field load_field(const Grid& g, const std::vector<Load>& loads, int comps, double t);

/// Natural-boundary nodal loads: face-trapezoid integrals of the prescribed
/// traction, surface charge and heat flux over natural nodes.
struct BoundaryLoads {
  Field traction;       // dim comps
  Field surface_charge; // 1 comp
  Field heat_flux;      // 1 comp
};

/// Writes essential data at time t into u / phi / theta (essential nodes only)
/// and returns the natural-side nodal loads.
BoundaryLoads apply_boundary_conditions(const Grid& g, const IncrementalAction& a, double t,
                                        Field& u, Field& phi, Field& theta);

/// CSV with a version comment line, then one row per node: coordinates, values.
std::string field_csv(const Grid& g, const std::vector<std::pair<std::string, const Field*>>& cols);

}  // namespace itee
