#include "itee/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "itee/errors.hpp"

namespace itee {

std::string to_string(Face f) {
  switch (f) {
    case Face::Left: return "left";
    case Face::Right: return "right";
    case Face::Bottom: return "bottom";
    case Face::Top: return "top";
  }
  return "?";
}

std::string to_string(Physics p) {
  switch (p) {
    case Physics::Mechanical: return "mechanical";
    case Physics::Electric: return "electric";
    case Physics::Thermal: return "thermal";
  }
  return "?";
}

Face face_from_string(const std::string& s) {
  if (s == "left") return Face::Left;
  if (s == "right") return Face::Right;
  if (s == "bottom") return Face::Bottom;
  if (s == "top") return Face::Top;
  throw ValidationError("unknown face '" + s + "'");
}

std::vector<Face> faces_of(int dim) {
  if (dim == 1) return {Face::Left, Face::Right};
  return {Face::Left, Face::Right, Face::Bottom, Face::Top};
}

namespace {

int axis_of(Face f) { return (f == Face::Left || f == Face::Right) ? 0 : 1; }

Vec normal_of(Face f) {
  Vec n;
  n(axis_of(f)) = (f == Face::Left || f == Face::Bottom) ? -1.0 : 1.0;
  return n;
}

void check_face_list(const GridSpec& s, Physics p) {
  const auto& part = s.partitions[static_cast<int>(p)];
  const auto all = faces_of(s.dim);
  auto valid = [&](Face f) { return std::find(all.begin(), all.end(), f) != all.end(); };
  for (Face f : part.essential)
    if (!valid(f)) throw ValidationError(to_string(p) + " boundary: face " + to_string(f) +
                                         " does not exist in " + std::to_string(s.dim) + "-D");
  for (Face f : part.natural)
    if (!valid(f)) throw ValidationError(to_string(p) + " boundary: face " + to_string(f) +
                                         " does not exist in " + std::to_string(s.dim) + "-D");
  for (Face f : all) {
    const bool e = std::find(part.essential.begin(), part.essential.end(), f) != part.essential.end();
    const bool n = std::find(part.natural.begin(), part.natural.end(), f) != part.natural.end();
    if (e && n)
      throw ValidationError(to_string(p) + " boundary: face " + to_string(f) +
                            " is both essential and natural; the two sides must be disjoint");
    if (!e && !n)
      throw ValidationError(to_string(p) + " boundary: face " + to_string(f) +
                            " is unassigned; the two sides must cover the boundary");
  }
}

}  // namespace

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec_.dim != 1 && spec_.dim != 2) throw ValidationError("grid dimension must be 1 or 2");
  if (spec_.dim == 1) {
    spec_.n[1] = 1;
    spec_.extents[1] = 1.0;
  }
  for (int a = 0; a < spec_.dim; ++a) {
    if (spec_.n[a] < 3) throw GridTooSmall("grid needs at least 3 nodes per axis");
    if (!(spec_.extents[a] > 0.0)) throw ValidationError("grid extents must be positive");
    h_[a] = spec_.extents[a] / (spec_.n[a] - 1);
  }
  nodes_ = spec_.n[0] * spec_.n[1];
  for (int p = 0; p < 3; ++p) check_face_list(spec_, static_cast<Physics>(p));

  const auto faces = faces_of(spec_.dim);
  for (int p = 0; p < 3; ++p) {
    auto& lab = labels_[p];
    lab.assign(nodes_, Side::Interior);
    const auto& ess = spec_.partitions[p].essential;
    for (int k = 0; k < nodes_; ++k) {
      bool boundary = false, essential = false;
      for (Face f : faces) {
        if (!on_face(k, f)) continue;
        boundary = true;
        if (std::find(ess.begin(), ess.end(), f) != ess.end()) essential = true;
      }
      if (boundary) lab[k] = essential ? Side::Essential : Side::Natural;
    }
  }

  vol_w_.assign(nodes_, 0.0);
  if (spec_.dim == 1) {
    const double w = 0.5 * h_[0];
    for (int e = 0; e + 1 < spec_.n[0]; ++e)
      for (int a = 0; a < 2; ++a) {
        QuadPoint q{e + a, w, {e + 1, 0}, {e, 0}, {1.0 / h_[0], 0.0}};
        quad_.push_back(q);
        vol_w_[e + a] += w;
      }
  } else {
    const double w = 0.25 * h_[0] * h_[1];
    for (int j = 0; j + 1 < spec_.n[1]; ++j)
      for (int i = 0; i + 1 < spec_.n[0]; ++i)
        for (int b = 0; b < 2; ++b)
          for (int a = 0; a < 2; ++a) {
            QuadPoint q;
            q.node = node(i + a, j + b);
            q.weight = w;
            q.plus = {node(i + 1, j + b), node(i + a, j + 1)};
            q.minus = {node(i, j + b), node(i + a, j)};
            q.inv_h = {1.0 / h_[0], 1.0 / h_[1]};
            quad_.push_back(q);
            vol_w_[q.node] += w;
          }
  }

  for (Face f : faces) {
    const Vec nrm = normal_of(f);
    for (int k = 0; k < nodes_; ++k) {
      if (!on_face(k, f)) continue;
      double w = 1.0;
      if (spec_.dim == 2) {
        const int along = 1 - axis_of(f);
        const int i = index(k)[along];
        w = h_[along] * ((i == 0 || i == spec_.n[along] - 1) ? 0.5 : 1.0);
      }
      surface_.push_back({k, f, w, nrm});
    }
  }
}

double Grid::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim(); ++a) m *= extent(a);
  return m;
}

std::array<int, 2> Grid::index(int k) const { return {k % spec_.n[0], k / spec_.n[0]}; }

Vec Grid::coord(int k) const {
  const auto ij = index(k);
  Vec x;
  for (int a = 0; a < dim(); ++a) x(a) = ij[a] * h_[a];
  return x;
}

bool Grid::on_face(int k, Face f) const {
  const auto ij = index(k);
  switch (f) {
    case Face::Left: return ij[0] == 0;
    case Face::Right: return ij[0] == spec_.n[0] - 1;
    case Face::Bottom: return dim() == 2 && ij[1] == 0;
    case Face::Top: return dim() == 2 && ij[1] == spec_.n[1] - 1;
  }
  return false;
}

Side Grid::face_side(Physics p, Face f) const {
  const auto& ess = spec_.partitions[static_cast<int>(p)].essential;
  return std::find(ess.begin(), ess.end(), f) != ess.end() ? Side::Essential : Side::Natural;
}

void Grid::check_partition_axioms(Physics p) const {
  check_face_list(spec_, p);
  const auto& lab = labels_[static_cast<int>(p)];
  for (int k = 0; k < nodes_; ++k) {
    bool boundary = false;
    for (Face f : faces_of(dim())) boundary = boundary || on_face(k, f);
    if (boundary != (lab[k] != Side::Interior))
      throw ValidationError(to_string(p) + " boundary labels do not cover the boundary exactly");
  }
}

Field sample(const Grid& g, int comps, const std::function<double(const Vec&, int)>& f) {
  Field out(g.nodes(), comps);
  for (int k = 0; k < g.nodes(); ++k) {
    const Vec x = g.coord(k);
    for (int c = 0; c < comps; ++c) out.at(k, c) = f(x, c);
  }
  return out;
}

namespace {

double axis_derivative(const Grid& g, const Field& f, int k, int c, int axis) {
  const auto ij = g.index(k);
  const int n = g.n(axis);
  const int i = ij[axis];
  const int stride = axis == 0 ? 1 : g.n(0);
  const double ih = 1.0 / g.h(axis);
  if (i == 0)
    return (-3.0 * f.at(k, c) + 4.0 * f.at(k + stride, c) - f.at(k + 2 * stride, c)) * 0.5 * ih;
  if (i == n - 1)
    return (3.0 * f.at(k, c) - 4.0 * f.at(k - stride, c) + f.at(k - 2 * stride, c)) * 0.5 * ih;
  return (f.at(k + stride, c) - f.at(k - stride, c)) * 0.5 * ih;
}

}  // namespace

Field gradient(const Grid& g, const Field& f) {
  const int d = g.dim();
  for (int a = 0; a < d; ++a)
    if (g.n(a) < 3) throw GridTooSmall("gradient needs at least 3 nodes per axis");
  Field out(g.nodes(), f.components * d);
  for (int k = 0; k < g.nodes(); ++k)
    for (int c = 0; c < f.components; ++c)
      for (int a = 0; a < d; ++a) out.at(k, c * d + a) = axis_derivative(g, f, k, c, a);
  return out;
}

Field divergence(const Grid& g, const Field& f) {
  const int d = g.dim();
  if (f.components % d != 0) throw ValidationError("divergence: component count not a multiple of dim");
  for (int a = 0; a < d; ++a)
    if (g.n(a) < 3) throw GridTooSmall("divergence needs at least 3 nodes per axis");
  Field out(g.nodes(), f.components / d);
  for (int k = 0; k < g.nodes(); ++k)
    for (int c = 0; c < out.components; ++c) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += axis_derivative(g, f, k, c * d + a, a);
      out.at(k, c) = s;
    }
  return out;
}

std::vector<double> integrate_volume(const Grid& g, const Field& f) {
  std::vector<double> s(f.components, 0.0);
  const auto& w = g.volume_weights();
  for (int k = 0; k < g.nodes(); ++k)
    for (int c = 0; c < f.components; ++c) s[c] += w[k] * f.at(k, c);
  return s;
}

std::vector<double> integrate_surface(const Grid& g, const Field& f, Physics p, Side side) {
  std::vector<double> s(f.components, 0.0);
  for (const auto& sp : g.surface()) {
    if (g.side(p, sp.node) != side) continue;
    for (int c = 0; c < f.components; ++c) s[c] += sp.weight * f.at(sp.node, c);
  }
  return s;
}

double evaluate(const Signal& s, double t) {
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantSignal>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, RampSignal>) {
          return v.slope * std::max(0.0, t - v.start);
        } else if constexpr (std::is_same_v<T, SineSignal>) {
          return v.amplitude * std::sin(v.omega * t + v.phase);
        } else {
          const double z = (t - v.center) / v.width;
          return v.amplitude * std::exp(-0.5 * z * z);
        }
      },
      s);
}

double evaluate(const Profile& p, const Grid& g, const Vec& X) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformProfile>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, GaussianProfile>) {
          double r2 = 0.0;
          for (int a = 0; a < g.dim(); ++a) r2 += (X(a) - v.center(a)) * (X(a) - v.center(a));
          return std::exp(-0.5 * r2 / (v.width * v.width));
        } else {
          double s = 1.0;
          for (int a = 0; a < g.dim(); ++a)
            s *= std::sin(v.mode[a] * std::numbers::pi * X(a) / g.extent(a));
          return s;
        }
      },
      p);
}

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Displacement: return "displacement";
    case BoundaryKind::Traction: return "traction";
    case BoundaryKind::Potential: return "potential";
    case BoundaryKind::SurfaceCharge: return "surface_charge";
    case BoundaryKind::Temperature: return "temperature";
    case BoundaryKind::HeatFlux: return "heat_flux";
  }
  return "?";
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
  for (auto k : {BoundaryKind::Displacement, BoundaryKind::Traction, BoundaryKind::Potential,
                 BoundaryKind::SurfaceCharge, BoundaryKind::Temperature, BoundaryKind::HeatFlux})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown boundary field '" + s + "'");
}

Physics physics_of(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Displacement:
    case BoundaryKind::Traction: return Physics::Mechanical;
    case BoundaryKind::Potential:
    case BoundaryKind::SurfaceCharge: return Physics::Electric;
    default: return Physics::Thermal;
  }
}

bool is_essential(BoundaryKind k) {
  return k == BoundaryKind::Displacement || k == BoundaryKind::Potential ||
         k == BoundaryKind::Temperature;
}

namespace {

template <class T>
void scale_list(std::vector<T>& v, double a) {
  for (auto& x : v)
    for (double& c : x.amplitude) c *= a;
}

}  // namespace

IncrementalAction IncrementalAction::scaled(double a) const {
  IncrementalAction r = *this;
  scale_list(r.body_force, a);
  scale_list(r.charge, a);
  scale_list(r.heat_source, a);
  for (auto& b : r.boundary)
    for (double& c : b.value) c *= a;
  return r;
}

IncrementalAction IncrementalAction::combined(const IncrementalAction& o) const {
  IncrementalAction r = *this;
  r.body_force.insert(r.body_force.end(), o.body_force.begin(), o.body_force.end());
  r.charge.insert(r.charge.end(), o.charge.begin(), o.charge.end());
  r.heat_source.insert(r.heat_source.end(), o.heat_source.begin(), o.heat_source.end());
  r.boundary.insert(r.boundary.end(), o.boundary.begin(), o.boundary.end());
  return r;
}

void validate_action(const Grid& g, const IncrementalAction& a) {
  const int d = g.dim();
  auto check_loads = [](const std::vector<Load>& v, int comps, const char* what) {
    for (const auto& l : v)
      if (static_cast<int>(l.amplitude.size()) != comps)
        throw ValidationError(std::string(what) + " amplitude needs " + std::to_string(comps) +
                              " components");
  };
  check_loads(a.body_force, d, "body_force");
  check_loads(a.charge, 1, "charge");
  check_loads(a.heat_source, 1, "heat_source");
  const auto faces = faces_of(d);
  for (const auto& b : a.boundary) {
    if (std::find(faces.begin(), faces.end(), b.face) == faces.end())
      throw ValidationError("boundary datum on face " + to_string(b.face) + " which does not exist");
    const Physics p = physics_of(b.kind);
    const int comps = p == Physics::Mechanical ? d : 1;
    if (static_cast<int>(b.value.size()) != comps)
      throw ValidationError(to_string(b.kind) + " datum needs " + std::to_string(comps) +
                            " components");
    const Side want = is_essential(b.kind) ? Side::Essential : Side::Natural;
    if (g.face_side(p, b.face) != want)
      throw PartitionMismatch(to_string(b.kind) + " datum on face " + to_string(b.face) +
                              ", which is not a " +
                              (want == Side::Essential ? "essential" : "natural") + " " +
                              to_string(p) + " face");
  }
}

Field load_field(const Grid& g, const std::vector<Load>& loads, int comps, double t) {
  Field out(g.nodes(), comps);
  for (const auto& l : loads) {
    const double s = evaluate(l.signal, t);
    if (s == 0.0) continue;
    for (int k = 0; k < g.nodes(); ++k) {
      const double pr = evaluate(l.profile, g, g.coord(k)) * s;
      for (int c = 0; c < comps; ++c) out.at(k, c) += l.amplitude[c] * pr;
    }
  }
  return out;
}

BoundaryLoads apply_boundary_conditions(const Grid& g, const IncrementalAction& a, double t,
                                        Field& u, Field& phi, Field& theta) {
  validate_action(g, a);
  const int d = g.dim();
  BoundaryLoads bl{Field(g.nodes(), d), Field(g.nodes(), 1), Field(g.nodes(), 1)};
  Field* targets[3] = {&u, &phi, &theta};
  const auto faces = faces_of(d);

  // An essential node takes the data of the first essential face (in
  // left/right/bottom/top order) containing it, so corner values stay linear
  // in the data.
  for (int p = 0; p < 3; ++p) {
    const auto ph = static_cast<Physics>(p);
    Field& f = *targets[p];
    for (int k = 0; k < g.nodes(); ++k) {
      if (g.side(ph, k) != Side::Essential) continue;
      Face owner = Face::Left;
      for (Face fc : faces)
        if (g.on_face(k, fc) && g.face_side(ph, fc) == Side::Essential) {
          owner = fc;
          break;
        }
      for (int c = 0; c < f.components; ++c) f.at(k, c) = 0.0;
      for (const auto& b : a.boundary) {
        if (physics_of(b.kind) != ph || !is_essential(b.kind) || b.face != owner) continue;
        const double s = evaluate(b.signal, t);
        for (int c = 0; c < f.components; ++c) f.at(k, c) += b.value[c] * s;
      }
    }
  }

  for (const auto& b : a.boundary) {
    if (is_essential(b.kind)) continue;
    const Physics ph = physics_of(b.kind);
    Field& out = ph == Physics::Mechanical ? bl.traction
                 : ph == Physics::Electric ? bl.surface_charge
                                           : bl.heat_flux;
    const double s = evaluate(b.signal, t);
    for (const auto& sp : g.surface()) {
      if (sp.face != b.face || g.side(ph, sp.node) != Side::Natural) continue;
      for (int c = 0; c < out.components; ++c) out.at(sp.node, c) += sp.weight * b.value[c] * s;
    }
  }
  return bl;
}

std::string field_csv(const Grid& g,
                      const std::vector<std::pair<std::string, const Field*>>& cols) {
  std::ostringstream os;
  os.precision(17);
  os << "# itee-field-csv v1\n";
  const char* axes[2] = {"x", "y"};
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << axes[a];
  for (const auto& [name, f] : cols) {
    if (f->components == 1) {
      os << "," << name;
    } else {
      for (int c = 0; c < f->components; ++c) os << "," << name << "_" << c;
    }
  }
  os << "\n";
  for (int k = 0; k < g.nodes(); ++k) {
    const Vec x = g.coord(k);
    for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << x(a);
    for (const auto& col : cols)
      for (int c = 0; c < col.second->components; ++c) os << "," << col.second->at(k, c);
    os << "\n";
  }
  return os.str();
}

}  // namespace itee
