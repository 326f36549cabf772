#include "itee/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "itee/errors.hpp"

namespace itee {

int voigt_size(int d) { return d == 1 ? 1 : 3; }

int voigt(int K, int L, int d) {
  if (d == 1) return 0;
  return K == L ? K : 2;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : src_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& key, const std::string& msg) const {
    int line = 0;
    if (n.IsDefined() && !n.Mark().is_null()) line = n.Mark().line + 1;
    throw ParseError(src_ + ":" + std::to_string(line) + ": " + key + ": " + msg, line, key);
  }

  void map(const YAML::Node& n, const std::string& path) const {
    if (!n.IsMap()) fail(n, path, "expected a mapping");
  }

  void keys(const YAML::Node& n, const std::string& path,
            std::initializer_list<const char*> allowed) const {
    map(n, path);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
      const std::string k = kv.first.as<std::string>();
      if (!ok.count(k)) fail(kv.first, join(path, k), "unknown key");
    }
  }

  double num(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail(n, path, "expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, path, "expected a number, got '" + n.Scalar() + "'");
    }
  }

  int integer(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail(n, path, "expected an integer");
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, path, "expected an integer, got '" + n.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail(n, path, "expected true or false");
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, path, "expected true or false, got '" + n.Scalar() + "'");
    }
  }

  std::string str(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail(n, path, "expected a string");
    return n.Scalar();
  }

  std::vector<double> list(const YAML::Node& n, const std::string& path, int expected = -1) const {
    if (!n.IsSequence()) fail(n, path, "expected a list");
    if (expected >= 0 && static_cast<int>(n.size()) != expected)
      fail(n, path, "expected " + std::to_string(expected) + " entries, got " +
                        std::to_string(n.size()));
    std::vector<double> v;
    for (size_t i = 0; i < n.size(); ++i) v.push_back(num(n[i], path + "[" + std::to_string(i) + "]"));
    return v;
  }

  std::vector<std::vector<double>> matrix(const YAML::Node& n, const std::string& path, int rows,
                                          int cols) const {
    if (!n.IsSequence() || static_cast<int>(n.size()) != rows)
      fail(n, path, "expected " + std::to_string(rows) + " rows");
    std::vector<std::vector<double>> m;
    for (int i = 0; i < rows; ++i) m.push_back(list(n[i], path + "[" + std::to_string(i) + "]", cols));
    return m;
  }

  static std::string join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

 private:
  std::string src_;
};

Vec to_vec(const std::vector<double>& v) {
  Vec r;
  for (size_t i = 0; i < v.size(); ++i) r(static_cast<int>(i)) = v[i];
  return r;
}

Mat to_mat(const std::vector<std::vector<double>>& m) {
  Mat r;
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = m[i][j];
  return r;
}

const char* physics_key(int p) {
  static const char* names[] = {"mechanical", "electric", "thermal"};
  return names[p];
}

struct Parser {
  Reader rd;
  int d = 1;

  std::vector<Face> faces(const YAML::Node& n, const std::string& path) const {
    if (!n.IsSequence()) rd.fail(n, path, "expected a list of faces");
    std::vector<Face> f;
    for (size_t i = 0; i < n.size(); ++i) {
      const std::string s = rd.str(n[i], path);
      try {
        f.push_back(face_from_string(s));
      } catch (const Error&) {
        rd.fail(n[i], path, "unknown face '" + s + "'");
      }
    }
    return f;
  }

  GridSpec grid(const YAML::Node& n) {
    const std::string P = "grid";
    rd.keys(n, P, {"dim", "n", "extents", "partitions"});
    GridSpec g;
    if (!n["dim"]) rd.fail(n, P + ".dim", "missing");
    g.dim = rd.integer(n["dim"], P + ".dim");
    if (g.dim != 1 && g.dim != 2) rd.fail(n["dim"], P + ".dim", "must be 1 or 2");
    d = g.dim;
    if (!n["n"]) rd.fail(n, P + ".n", "missing");
    const auto nn = rd.list(n["n"], P + ".n", d);
    for (int a = 0; a < d; ++a) {
      g.n[a] = static_cast<int>(nn[a]);
      if (g.n[a] != nn[a]) rd.fail(n["n"], P + ".n", "node counts must be integers");
    }
    if (n["extents"]) {
      const auto e = rd.list(n["extents"], P + ".extents", d);
      for (int a = 0; a < d; ++a) g.extents[a] = e[a];
    }
    for (auto& part : g.partitions) part.essential = faces_of(d);
    if (n["partitions"]) {
      const auto& pn = n["partitions"];
      rd.keys(pn, P + ".partitions", {"mechanical", "electric", "thermal"});
      for (int p = 0; p < 3; ++p) {
        const auto& q = pn[physics_key(p)];
        if (!q) continue;
        const std::string path = P + ".partitions." + physics_key(p);
        rd.keys(q, path, {"essential", "natural"});
        g.partitions[p].essential =
            q["essential"] ? faces(q["essential"], path + ".essential") : std::vector<Face>{};
        g.partitions[p].natural =
            q["natural"] ? faces(q["natural"], path + ".natural") : std::vector<Face>{};
      }
    }
    return g;
  }

  MaterialModel material(const YAML::Node& n) {
    const std::string P = "material";
    rd.keys(n, P, {"rho0", "eps0", "theta_ref", "a_heat", "c2", "c3", "e_piezo", "chi_diel",
                   "lam_thermo", "p_pyro", "kappa_cond"});
    MaterialModel m;
    m.dim = d;
    const int nv = voigt_size(d);
    if (n["rho0"]) m.rho0 = rd.num(n["rho0"], P + ".rho0");
    if (n["eps0"]) m.eps0 = rd.num(n["eps0"], P + ".eps0");
    if (n["theta_ref"]) m.theta_ref = rd.num(n["theta_ref"], P + ".theta_ref");
    if (n["a_heat"]) m.a_heat = rd.num(n["a_heat"], P + ".a_heat");
    if (!n["c2"]) rd.fail(n, P + ".c2", "missing");
    const auto c2 = rd.matrix(n["c2"], P + ".c2", nv, nv);
    for (int K = 0; K < d; ++K)
      for (int L = 0; L < d; ++L)
        for (int M = 0; M < d; ++M)
          for (int N = 0; N < d; ++N) m.c2(K, L, M, N) = c2[voigt(K, L, d)][voigt(M, N, d)];
    if (n["c3"]) {
      const auto& cn = n["c3"];
      if (!cn.IsSequence() || static_cast<int>(cn.size()) != nv)
        rd.fail(cn, P + ".c3", "expected " + std::to_string(nv) + " blocks");
      std::vector<std::vector<std::vector<double>>> c3;
      for (int i = 0; i < nv; ++i)
        c3.push_back(rd.matrix(cn[i], P + ".c3[" + std::to_string(i) + "]", nv, nv));
      Tensor6 t;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e)
              for (int f = 0; f < d; ++f)
                for (int g = 0; g < d; ++g)
                  t(a, b, c, e, f, g) = c3[voigt(a, b, d)][voigt(c, e, d)][voigt(f, g, d)];
      m.c3 = t;
    }
    if (n["e_piezo"]) {
      const auto e = rd.matrix(n["e_piezo"], P + ".e_piezo", d, nv);
      for (int M = 0; M < d; ++M)
        for (int K = 0; K < d; ++K)
          for (int L = 0; L < d; ++L) m.e_piezo(M, K, L) = e[M][voigt(K, L, d)];
    }
    if (n["chi_diel"]) m.chi_diel = to_mat(rd.matrix(n["chi_diel"], P + ".chi_diel", d, d));
    if (n["lam_thermo"]) {
      const auto l = rd.list(n["lam_thermo"], P + ".lam_thermo", nv);
      for (int K = 0; K < d; ++K)
        for (int L = 0; L < d; ++L) m.lam_thermo(K, L) = l[voigt(K, L, d)];
    }
    if (n["p_pyro"]) m.p_pyro = to_vec(rd.list(n["p_pyro"], P + ".p_pyro", d));
    m.kappa_cond = n["kappa_cond"] ? to_mat(rd.matrix(n["kappa_cond"], P + ".kappa_cond", d, d))
                                   : Mat::identity(d);
    return m;
  }

  BiasSpec bias(const YAML::Node& n, double theta_ref) {
    const std::string P = "bias";
    BiasSpec b;
    b.F0 = Mat::identity(d);
    b.theta_c = theta_ref;
    if (!n) return b;
    rd.keys(n, P, {"F0", "W0", "theta0"});
    if (n["F0"]) b.F0 = to_mat(rd.matrix(n["F0"], P + ".F0", d, d));
    if (n["W0"]) b.W0 = to_vec(rd.list(n["W0"], P + ".W0", d));
    if (n["theta0"]) {
      const auto& t = n["theta0"];
      rd.keys(t, P + ".theta0", {"uniform", "affine"});
      if (t.size() != 1) rd.fail(t, P + ".theta0", "give exactly one of uniform, affine");
      if (t["uniform"]) {
        b.theta_uniform = true;
        b.theta_c = rd.num(t["uniform"], P + ".theta0.uniform");
      } else {
        const auto& a = t["affine"];
        rd.keys(a, P + ".theta0.affine", {"center", "gradient"});
        if (!a["center"] || !a["gradient"])
          rd.fail(a, P + ".theta0.affine", "needs center and gradient");
        b.theta_uniform = false;
        b.theta_c = rd.num(a["center"], P + ".theta0.affine.center");
        b.theta_grad = to_vec(rd.list(a["gradient"], P + ".theta0.affine.gradient", d));
      }
    }
    return b;
  }

  Signal signal(const YAML::Node& n, const std::string& P) {
    rd.keys(n, P, {"constant", "ramp", "sine", "gaussian_pulse"});
    if (n.size() != 1) rd.fail(n, P, "give exactly one signal kind");
    if (const auto& c = n["constant"]) {
      rd.keys(c, P + ".constant", {"value"});
      ConstantSignal s;
      if (c["value"]) s.value = rd.num(c["value"], P + ".constant.value");
      return s;
    }
    if (const auto& c = n["ramp"]) {
      rd.keys(c, P + ".ramp", {"slope", "start"});
      RampSignal s;
      if (c["slope"]) s.slope = rd.num(c["slope"], P + ".ramp.slope");
      if (c["start"]) s.start = rd.num(c["start"], P + ".ramp.start");
      return s;
    }
    if (const auto& c = n["sine"]) {
      rd.keys(c, P + ".sine", {"amplitude", "omega", "phase"});
      SineSignal s;
      if (c["amplitude"]) s.amplitude = rd.num(c["amplitude"], P + ".sine.amplitude");
      if (c["omega"]) s.omega = rd.num(c["omega"], P + ".sine.omega");
      if (c["phase"]) s.phase = rd.num(c["phase"], P + ".sine.phase");
      return s;
    }
    const auto& c = n["gaussian_pulse"];
    rd.keys(c, P + ".gaussian_pulse", {"amplitude", "center", "width"});
    GaussianPulseSignal s;
    if (c["amplitude"]) s.amplitude = rd.num(c["amplitude"], P + ".gaussian_pulse.amplitude");
    if (c["center"]) s.center = rd.num(c["center"], P + ".gaussian_pulse.center");
    if (c["width"]) s.width = rd.num(c["width"], P + ".gaussian_pulse.width");
    if (!(s.width > 0.0)) rd.fail(c, P + ".gaussian_pulse.width", "must be positive");
    return s;
  }

  Profile profile(const YAML::Node& n, const std::string& P) {
    if (n.IsScalar()) {
      if (n.Scalar() != "uniform") rd.fail(n, P, "unknown profile '" + n.Scalar() + "'");
      return UniformProfile{};
    }
    rd.keys(n, P, {"uniform", "gaussian", "sine"});
    if (n.size() != 1) rd.fail(n, P, "give exactly one profile kind");
    if (n["uniform"]) return UniformProfile{};
    if (const auto& c = n["gaussian"]) {
      rd.keys(c, P + ".gaussian", {"center", "width"});
      GaussianProfile g;
      if (c["center"]) g.center = to_vec(rd.list(c["center"], P + ".gaussian.center", d));
      if (c["width"]) g.width = rd.num(c["width"], P + ".gaussian.width");
      if (!(g.width > 0.0)) rd.fail(c, P + ".gaussian.width", "must be positive");
      return g;
    }
    const auto& c = n["sine"];
    rd.keys(c, P + ".sine", {"mode"});
    SineProfile s;
    if (c["mode"]) {
      const auto m = rd.list(c["mode"], P + ".sine.mode", d);
      for (int a = 0; a < d; ++a) s.mode[a] = static_cast<int>(m[a]);
    }
    return s;
  }

  std::vector<Load> loads(const YAML::Node& n, const std::string& P, int comps) {
    std::vector<Load> out;
    if (!n) return out;
    if (!n.IsSequence()) rd.fail(n, P, "expected a list of loads");
    for (size_t i = 0; i < n.size(); ++i) {
      const std::string Q = P + "[" + std::to_string(i) + "]";
      const auto& e = n[i];
      rd.keys(e, Q, {"profile", "amplitude", "signal"});
      Load l;
      if (e["profile"]) l.profile = profile(e["profile"], Q + ".profile");
      if (!e["amplitude"]) rd.fail(e, Q + ".amplitude", "missing");
      l.amplitude = rd.list(e["amplitude"], Q + ".amplitude", comps);
      if (e["signal"]) l.signal = signal(e["signal"], Q + ".signal");
      out.push_back(l);
    }
    return out;
  }

  IncrementalAction action(const YAML::Node& n, const std::string& P) {
    IncrementalAction a;
    if (!n) return a;
    rd.keys(n, P, {"body_force", "charge", "heat_source", "boundary"});
    a.body_force = loads(n["body_force"], P + ".body_force", d);
    a.charge = loads(n["charge"], P + ".charge", 1);
    a.heat_source = loads(n["heat_source"], P + ".heat_source", 1);
    if (const auto& b = n["boundary"]) {
      if (!b.IsSequence()) rd.fail(b, P + ".boundary", "expected a list");
      for (size_t i = 0; i < b.size(); ++i) {
        const std::string Q = P + ".boundary[" + std::to_string(i) + "]";
        const auto& e = b[i];
        rd.keys(e, Q, {"face", "kind", "value", "signal"});
        BoundaryDatum bd;
        if (!e["face"] || !e["kind"] || !e["value"]) rd.fail(e, Q, "needs face, kind and value");
        try {
          bd.face = face_from_string(rd.str(e["face"], Q + ".face"));
        } catch (const ParseError&) {
          throw;
        } catch (const Error&) {
          rd.fail(e["face"], Q + ".face", "unknown face");
        }
        try {
          bd.kind = boundary_kind_from_string(rd.str(e["kind"], Q + ".kind"));
        } catch (const ParseError&) {
          throw;
        } catch (const Error&) {
          rd.fail(e["kind"], Q + ".kind", "unknown boundary kind");
        }
        const int comps =
            (bd.kind == BoundaryKind::Displacement || bd.kind == BoundaryKind::Traction) ? d : 1;
        bd.value = rd.list(e["value"], Q + ".value", comps);
        if (e["signal"]) bd.signal = signal(e["signal"], Q + ".signal");
        a.boundary.push_back(bd);
      }
    }
    return a;
  }

  InitialData initial(const YAML::Node& n, const std::string& P) {
    InitialData ic;
    if (!n) return ic;
    rd.keys(n, P, {"u", "v", "theta"});
    ic.u = loads(n["u"], P + ".u", d);
    ic.v = loads(n["v"], P + ".v", d);
    ic.theta = loads(n["theta"], P + ".theta", 1);
    return ic;
  }

  IntegratorSpec integrator(const YAML::Node& n) {
    const std::string P = "integrator";
    IntegratorSpec s;
    if (!n) return s;
    rd.keys(n, P, {"dt", "t_final", "save_stride", "gauge_fix", "strict_stability"});
    if (n["dt"]) s.dt = rd.num(n["dt"], P + ".dt");
    if (n["t_final"]) s.t_final = rd.num(n["t_final"], P + ".t_final");
    if (n["save_stride"]) s.save_stride = rd.integer(n["save_stride"], P + ".save_stride");
    if (n["gauge_fix"]) s.gauge_fix = rd.boolean(n["gauge_fix"], P + ".gauge_fix");
    if (n["strict_stability"])
      s.strict_stability = rd.boolean(n["strict_stability"], P + ".strict_stability");
    return s;
  }

  VerificationSpec verification(const YAML::Node& n) {
    const std::string P = "verification";
    VerificationSpec v;
    if (!n) return v;
    rd.keys(n, P, {"p", "t_char", "levels", "seed", "perturbation", "loading_b", "kappa1_injection"});
    if (n["p"]) v.p = rd.list(n["p"], P + ".p");
    if (n["t_char"]) v.t_char = rd.num(n["t_char"], P + ".t_char");
    if (n["levels"]) v.levels = rd.integer(n["levels"], P + ".levels");
    if (n["seed"]) v.seed = static_cast<unsigned>(rd.integer(n["seed"], P + ".seed"));
    v.perturbation = initial(n["perturbation"], P + ".perturbation");
    v.loading_b = action(n["loading_b"], P + ".loading_b");
    if (n["kappa1_injection"])
      v.kappa1_injection = to_vec(rd.list(n["kappa1_injection"], P + ".kappa1_injection", d));
    return v;
  }
};

void validate_config(const Config& c) {
  const Scenario& s = c.scenario;
  s.material.validate();
  const Grid g(s.grid);  // partition axioms, grid size
  build_bias_state(s.material, s.bias, g);
  validate_action(g, s.action);
  validate_action(g, c.verification.loading_b);
  const auto& it = s.integrator;
  if (!(it.dt > 0.0)) throw ValidationError("integrator.dt must be positive");
  if (!(it.t_final > 0.0)) throw ValidationError("integrator.t_final must be positive");
  if (it.save_stride < 1) throw ValidationError("integrator.save_stride must be at least 1");
  for (double p : c.verification.p)
    if (!(p > 0.0)) throw ValidationError("verification.p entries must be positive");
  if (!(c.verification.t_char > 0.0)) throw ValidationError("verification.t_char must be positive");
  if (c.verification.levels < 1) throw ValidationError("verification.levels must be at least 1");
}

// ---------------------------------------------------------------------------
// Emission

void emit_list(YAML::Emitter& e, const std::vector<double>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << x;
  e << YAML::EndSeq;
}

void emit_vec(YAML::Emitter& e, const Vec& v, int d) {
  std::vector<double> l;
  for (int i = 0; i < d; ++i) l.push_back(v(i));
  emit_list(e, l);
}

void emit_mat(YAML::Emitter& e, const Mat& m, int d) {
  e << YAML::BeginSeq;
  for (int i = 0; i < d; ++i) {
    std::vector<double> r;
    for (int j = 0; j < d; ++j) r.push_back(m(i, j));
    emit_list(e, r);
  }
  e << YAML::EndSeq;
}

// Representative index pair of a Voigt slot.
std::pair<int, int> voigt_pair(int I, int d) {
  if (d == 1) return {0, 0};
  return I < 2 ? std::pair{I, I} : std::pair{0, 1};
}

void emit_signal(YAML::Emitter& e, const Signal& s) {
  e << YAML::Flow << YAML::BeginMap;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstantSignal>) {
          e << YAML::Key << "constant" << YAML::Value << YAML::BeginMap << YAML::Key << "value"
            << YAML::Value << x.value << YAML::EndMap;
        } else if constexpr (std::is_same_v<T, RampSignal>) {
          e << YAML::Key << "ramp" << YAML::Value << YAML::BeginMap << YAML::Key << "slope"
            << YAML::Value << x.slope << YAML::Key << "start" << YAML::Value << x.start
            << YAML::EndMap;
        } else if constexpr (std::is_same_v<T, SineSignal>) {
          e << YAML::Key << "sine" << YAML::Value << YAML::BeginMap << YAML::Key << "amplitude"
            << YAML::Value << x.amplitude << YAML::Key << "omega" << YAML::Value << x.omega
            << YAML::Key << "phase" << YAML::Value << x.phase << YAML::EndMap;
        } else {
          e << YAML::Key << "gaussian_pulse" << YAML::Value << YAML::BeginMap << YAML::Key
            << "amplitude" << YAML::Value << x.amplitude << YAML::Key << "center" << YAML::Value
            << x.center << YAML::Key << "width" << YAML::Value << x.width << YAML::EndMap;
        }
      },
      s);
  e << YAML::EndMap;
}

void emit_profile(YAML::Emitter& e, const Profile& p, int d) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UniformProfile>) {
          e << "uniform";
        } else if constexpr (std::is_same_v<T, GaussianProfile>) {
          e << YAML::Flow << YAML::BeginMap << YAML::Key << "gaussian" << YAML::Value
            << YAML::BeginMap << YAML::Key << "center" << YAML::Value;
          emit_vec(e, x.center, d);
          e << YAML::Key << "width" << YAML::Value << x.width << YAML::EndMap << YAML::EndMap;
        } else {
          e << YAML::Flow << YAML::BeginMap << YAML::Key << "sine" << YAML::Value
            << YAML::BeginMap << YAML::Key << "mode" << YAML::Value << YAML::Flow
            << YAML::BeginSeq;
          for (int a = 0; a < d; ++a) e << x.mode[a];
          e << YAML::EndSeq << YAML::EndMap << YAML::EndMap;
        }
      },
      p);
}

void emit_loads(YAML::Emitter& e, const std::vector<Load>& loads, int d) {
  e << YAML::BeginSeq;
  for (const auto& l : loads) {
    e << YAML::BeginMap << YAML::Key << "profile" << YAML::Value;
    emit_profile(e, l.profile, d);
    e << YAML::Key << "amplitude" << YAML::Value;
    emit_list(e, l.amplitude);
    e << YAML::Key << "signal" << YAML::Value;
    emit_signal(e, l.signal);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
}

void emit_action(YAML::Emitter& e, const IncrementalAction& a, int d) {
  e << YAML::BeginMap;
  e << YAML::Key << "body_force" << YAML::Value;
  emit_loads(e, a.body_force, d);
  e << YAML::Key << "charge" << YAML::Value;
  emit_loads(e, a.charge, d);
  e << YAML::Key << "heat_source" << YAML::Value;
  emit_loads(e, a.heat_source, d);
  e << YAML::Key << "boundary" << YAML::Value << YAML::BeginSeq;
  for (const auto& b : a.boundary) {
    e << YAML::BeginMap << YAML::Key << "face" << YAML::Value << to_string(b.face) << YAML::Key
      << "kind" << YAML::Value << to_string(b.kind) << YAML::Key << "value" << YAML::Value;
    emit_list(e, b.value);
    e << YAML::Key << "signal" << YAML::Value;
    emit_signal(e, b.signal);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq << YAML::EndMap;
}

void emit_initial(YAML::Emitter& e, const InitialData& ic, int d) {
  e << YAML::BeginMap << YAML::Key << "u" << YAML::Value;
  emit_loads(e, ic.u, d);
  e << YAML::Key << "v" << YAML::Value;
  emit_loads(e, ic.v, d);
  e << YAML::Key << "theta" << YAML::Value;
  emit_loads(e, ic.theta, d);
  e << YAML::EndMap;
}

}  // namespace

Config parse_config_string(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    const int line = e.mark.is_null() ? 0 : e.mark.line + 1;
    throw ParseError(source + ":" + std::to_string(line) + ": " + e.msg, line, "");
  }
  if (!root.IsMap()) rd.fail(root, "", "top level must be a mapping");
  rd.keys(root, "", {"name", "material", "grid", "bias", "action", "initial", "integrator",
                     "verification"});
  if (!root["grid"]) rd.fail(root, "grid", "missing");
  if (!root["material"]) rd.fail(root, "material", "missing");
  Parser ps{rd};
  Config c;
  Scenario& s = c.scenario;
  if (root["name"]) s.name = rd.str(root["name"], "name");
  s.grid = ps.grid(root["grid"]);
  s.material = ps.material(root["material"]);
  s.bias = ps.bias(root["bias"], s.material.theta_ref);
  s.action = ps.action(root["action"], "action");
  s.initial = ps.initial(root["initial"], "initial");
  s.integrator = ps.integrator(root["integrator"]);
  c.verification = ps.verification(root["verification"]);
  validate_config(c);
  return c;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path, 0, "");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path);
}

std::string emit_config(const Config& c) {
  const Scenario& s = c.scenario;
  const int d = s.grid.dim;
  const int nv = voigt_size(d);
  const MaterialModel& m = s.material;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.name;

  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dim" << YAML::Value << d;
  e << YAML::Key << "n" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (int a = 0; a < d; ++a) e << s.grid.n[a];
  e << YAML::EndSeq;
  e << YAML::Key << "extents" << YAML::Value;
  emit_list(e, std::vector<double>(s.grid.extents.begin(), s.grid.extents.begin() + d));
  e << YAML::Key << "partitions" << YAML::Value << YAML::BeginMap;
  for (int p = 0; p < 3; ++p) {
    e << YAML::Key << physics_key(p) << YAML::Value << YAML::BeginMap;
    for (const auto& [key, list] : {std::pair{"essential", &s.grid.partitions[p].essential},
                                    std::pair{"natural", &s.grid.partitions[p].natural}}) {
      e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (Face f : *list) e << to_string(f);
      e << YAML::EndSeq;
    }
    e << YAML::EndMap;
  }
  e << YAML::EndMap << YAML::EndMap;

  e << YAML::Key << "material" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "rho0" << YAML::Value << m.rho0;
  e << YAML::Key << "eps0" << YAML::Value << m.eps0;
  e << YAML::Key << "theta_ref" << YAML::Value << m.theta_ref;
  e << YAML::Key << "a_heat" << YAML::Value << m.a_heat;
  e << YAML::Key << "c2" << YAML::Value << YAML::BeginSeq;
  for (int I = 0; I < nv; ++I) {
    std::vector<double> r;
    const auto [K, L] = voigt_pair(I, d);
    for (int J = 0; J < nv; ++J) {
      const auto [M, N] = voigt_pair(J, d);
      r.push_back(m.c2(K, L, M, N));
    }
    emit_list(e, r);
  }
  e << YAML::EndSeq;
  if (m.c3) {
    e << YAML::Key << "c3" << YAML::Value << YAML::BeginSeq;
    for (int I = 0; I < nv; ++I) {
      const auto [a, b] = voigt_pair(I, d);
      e << YAML::BeginSeq;
      for (int J = 0; J < nv; ++J) {
        const auto [c, dd] = voigt_pair(J, d);
        std::vector<double> r;
        for (int K = 0; K < nv; ++K) {
          const auto [f, g] = voigt_pair(K, d);
          r.push_back((*m.c3)(a, b, c, dd, f, g));
        }
        emit_list(e, r);
      }
      e << YAML::EndSeq;
    }
    e << YAML::EndSeq;
  }
  e << YAML::Key << "e_piezo" << YAML::Value << YAML::BeginSeq;
  for (int M = 0; M < d; ++M) {
    std::vector<double> r;
    for (int I = 0; I < nv; ++I) {
      const auto [K, L] = voigt_pair(I, d);
      r.push_back(m.e_piezo(M, K, L));
    }
    emit_list(e, r);
  }
  e << YAML::EndSeq;
  e << YAML::Key << "chi_diel" << YAML::Value;
  emit_mat(e, m.chi_diel, d);
  e << YAML::Key << "lam_thermo" << YAML::Value;
  {
    std::vector<double> r;
    for (int I = 0; I < nv; ++I) {
      const auto [K, L] = voigt_pair(I, d);
      r.push_back(m.lam_thermo(K, L));
    }
    emit_list(e, r);
  }
  e << YAML::Key << "p_pyro" << YAML::Value;
  emit_vec(e, m.p_pyro, d);
  e << YAML::Key << "kappa_cond" << YAML::Value;
  emit_mat(e, m.kappa_cond, d);
  e << YAML::EndMap;

  e << YAML::Key << "bias" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "F0" << YAML::Value;
  emit_mat(e, s.bias.F0, d);
  e << YAML::Key << "W0" << YAML::Value;
  emit_vec(e, s.bias.W0, d);
  e << YAML::Key << "theta0" << YAML::Value << YAML::BeginMap;
  if (s.bias.theta_uniform) {
    e << YAML::Key << "uniform" << YAML::Value << s.bias.theta_c;
  } else {
    e << YAML::Key << "affine" << YAML::Value << YAML::BeginMap << YAML::Key << "center"
      << YAML::Value << s.bias.theta_c << YAML::Key << "gradient" << YAML::Value;
    emit_vec(e, s.bias.theta_grad, d);
    e << YAML::EndMap;
  }
  e << YAML::EndMap << YAML::EndMap;

  e << YAML::Key << "action" << YAML::Value;
  emit_action(e, s.action, d);
  e << YAML::Key << "initial" << YAML::Value;
  emit_initial(e, s.initial, d);

  const auto& it = s.integrator;
  e << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dt" << YAML::Value << it.dt;
  e << YAML::Key << "t_final" << YAML::Value << it.t_final;
  e << YAML::Key << "save_stride" << YAML::Value << it.save_stride;
  e << YAML::Key << "gauge_fix" << YAML::Value << it.gauge_fix;
  e << YAML::Key << "strict_stability" << YAML::Value << it.strict_stability;
  e << YAML::EndMap;

  const auto& v = c.verification;
  e << YAML::Key << "verification" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "p" << YAML::Value;
  emit_list(e, v.p);
  e << YAML::Key << "t_char" << YAML::Value << v.t_char;
  e << YAML::Key << "levels" << YAML::Value << v.levels;
  e << YAML::Key << "seed" << YAML::Value << v.seed;
  e << YAML::Key << "perturbation" << YAML::Value;
  emit_initial(e, v.perturbation, d);
  e << YAML::Key << "loading_b" << YAML::Value;
  emit_action(e, v.loading_b, d);
  e << YAML::Key << "kappa1_injection" << YAML::Value;
  emit_vec(e, v.kappa1_injection, d);
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace itee
