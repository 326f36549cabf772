// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "itee/config.hpp"
#include "itee/pipelines.hpp"
#include "itee/theorems.hpp"
#include "oracles.hpp"

using namespace itee;

namespace {

Config load(const std::string& name) { return parse_config(std::string(ITEE_CONFIG_DIR) + "/" + name); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[96];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

Outcome tangent_symmetry() {
  constexpr double kSym = 1e-8, kFd = 1e-4;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double sym = 0.0, fd = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const Grid g(oracle::box(d, 5, 5));
    for (int k = 0; k < 100; ++k) {
      const MaterialModel m = oracle::random_material(rng, d);
      const BiasState b = build_bias_state(m, oracle::random_bias(rng, d), g);
      const double th = b.theta(Vec{});
      const EffectiveConstants ec = effective_constants(m, b, th);
      const SymmetryReport r = check_symmetries(ec, kSym);
      sym = std::max({sym, r.g_asymmetry, r.l_asymmetry});

      Mat gu;
      Vec gp;
      for (int i = 0; i < d; ++i) {
        gp(i) = u(rng);
        for (int j = 0; j < d; ++j) gu(i, j) = u(rng);
      }
      const double t1 = u(rng);
      const auto an = incremental_constitutive(ec, gu, gp, t1, Vec{});
      const auto ref = oracle::fd_increment(m, b, th, gu, gp, t1);
      double num = std::abs(an.eta1 - ref.eta1), den = std::abs(ref.eta1);
      for (int M = 0; M < d; ++M) {
        num = std::max(num, std::abs(an.Delta1(M) - ref.Delta1(M)));
        den = std::max(den, std::abs(ref.Delta1(M)));
        for (int c = 0; c < d; ++c) {
          num = std::max(num, std::abs(an.K1(M, c) - ref.K1(M, c)));
          den = std::max(den, std::abs(ref.K1(M, c)));
        }
      }
      fd = std::max(fd, num / den);
    }
  }
  return {sym <= kSym && fd <= kFd,
          "200 pairs, max asymmetry " + fmt("%.2e", sym) + " (<= 1e-8), FD oracle " + fmt("%.2e", fd) +
              " (<= 1e-4)"};
}

Outcome natural_state() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(102);
  double err = 0.0;
  bool exact = true;
  std::vector<Scenario> cases;
  for (int d = 1; d <= 2; ++d) {
    Scenario s;
    s.material = oracle::random_material(rng, d);
    s.grid = oracle::box(d, 9, 7, 1.0, 0.6);
    s.bias.theta_c = s.material.theta_ref;
    cases.push_back(s);
  }
  cases.push_back(load("natural.yaml").scenario);
  for (const auto& s : cases) {
    const auto disc = make_discretization(s);
    const auto op = oracle::classical_operators(s.material, disc->grid());
    auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
      return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
    };
    err = std::max({err, rel(Eigen::MatrixXd(disc->A()), op.A), rel(Eigen::MatrixXd(disc->H()), op.H),
                    rel(Eigen::MatrixXd(disc->C()), op.C)});
    const auto& ec = disc->node_constants(0);
    exact = exact && frobenius(ec.g_corr.a) == 0.0 && frobenius(ec.r_corr.a) == 0.0;
    for (int M = 0; M < s.material.dim; ++M)
      for (int N = 0; N < s.material.dim; ++N)
        exact = exact && ec.l_corr(M, N) == (M == N ? s.material.eps0 : 0.0);
  }
  return {err <= kTol && exact, "operators vs classical " + fmt("%.2e", err) +
                                    " (<= 1e-12), corrections " + (exact ? "exact" : "NOT exact")};
}

Outcome energy_balance() {
  const EnergyStudy c = energy_study(load("coupled.yaml"), 4);
  const EnergyStudy z = energy_study(load("closed.yaml"), 1);
  const bool ok = c.order.size() == 3 && c.min_order >= 0.9 && z.max_increase <= 1e-10;
  return {ok, "min order " + fmt("%.3f", c.min_order) + " over 3 refinements (>= 0.9), closed max step increase " +
                  fmt("%.2e", std::max(0.0, z.max_increase)) + " of initial (<= 1e-10)"};
}

Outcome dissipation() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  bool sign = true, fourier = true;
  int n = 0;
  const Config c = load("coupled.yaml");
  const auto disc = make_discretization(c.scenario);
  const MaterialModel m2 = oracle::random_material(rng, 2);
  const Grid g2(oracle::box(2, 8, 6));
  const BiasState b2 = build_bias_state(m2, oracle::random_bias(rng, 2), g2);
  for (int k = 0; k < 20; ++k) {
    const bool two = k % 2 == 1;
    const Grid& g = two ? g2 : disc->grid();
    const EffectiveConstants ec = two ? effective_constants(m2, b2, b2.theta_c) : disc->node_constants(0);
    const double th0 = two ? b2.theta_c : disc->bias().theta_c;
    IncrementalState s = zero_state(g);
    for (auto* f : {&s.u, &s.v, &s.phi, &s.theta})
      for (double& v : f->values) v = u(rng);
    const DissipationReport r = dissipation_identity(g, ec, th0, s);
    worst = std::max(worst, r.residual / std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0}));
    sign = sign && r.sign_ok;
    fourier = fourier && r.fourier_model;
    ++n;
  }
  return {worst <= 1e-10 && sign && fourier,
          std::to_string(n) + " random states, max |lhs - rhs| " + fmt("%.2e", worst) +
              " (<= 1e-10), pointwise Q.Theta <= 0 " + (sign ? "holds" : "VIOLATED")};
}

Outcome hamilton() {
  const Config c = load("coupled.yaml");
  const HamiltonStudy s = hamilton_study(c, c.verification.seed);
  const bool ok = s.density.max_error <= 1e-6 && s.max_el_vs_field <= 1e-10 && s.max_psi_norm <= 1e-10 &&
                  s.max_heat_norm <= 1e-10 && s.injection && s.min_injected_psi_norm > 1e-8 &&
                  s.max_defect_error <= 1e-10;
  return {ok, "density FD " + fmt("%.2e", s.density.max_error) + " (<= 1e-6), EL vs field " +
                  fmt("%.2e", s.max_el_vs_field) + " (<= 1e-10), Fourier psi " + fmt("%.2e", s.max_psi_norm) +
                  " (<= 1e-10), kappa_1 psi " + fmt("%.2e", s.min_injected_psi_norm) + " (> 1e-8) matching the " +
                  "predicted defect to " + fmt("%.2e", s.max_defect_error)};
}

Outcome reciprocity() {
  const Config c = load("bar_two_loads.yaml");
  const ReciprocityStudy s = reciprocity_study(c, {1.0, 2.0, 4.0}, 2);
  double swap = 0.0, same = 0.0;
  for (const auto& l : s.levels) {
    swap = std::max(swap, l.max_swap_error);
    same = std::max(same, l.max_identical);
  }
  const bool ok = s.levels.size() == 2 && s.max_relative <= 1e-3 && s.decreasing && swap == 0.0 && same == 0.0;
  return {ok, "p = {1,2,4}/t_char, max relative " + fmt("%.2e", s.max_relative) + " (<= 1e-3), " +
                  (s.decreasing ? "strictly decreasing" : "NOT decreasing") + " under refinement, identical " +
                  fmt("%.0e", same) + ", swap " + fmt("%.0e", swap)};
}

Outcome uniqueness() {
  const UniquenessStudy u = uniqueness_study(load("uniqueness.yaml"));

  Config z = load("uniqueness.yaml");
  z.scenario.action = IncrementalAction{};
  z.scenario.initial = InitialData{};
  double zero = 0.0;
  for (const auto& s : run_simulation(z.scenario).states)
    zero = std::max({zero, max_abs(s.u), max_abs(s.v), max_abs(s.phi), max_abs(s.theta)});
  const auto dz = make_discretization(load("uniqueness.yaml").scenario);
  const Config uc = load("uniqueness.yaml");
  const UniquenessReport same = uniqueness_experiment(dz, uc.scenario.action, uc.scenario.initial,
                                                      uc.scenario.initial, uc.scenario.integrator);
  zero = std::max(zero, same.max_difference_norm);

  const Config cc = load("conservative.yaml");
  const UniquenessStudy cs = uniqueness_study(cc);
  double drift = 0.0;
  const double e0 = cs.report.total.front();
  for (double e : cs.report.total) drift = std::max(drift, std::abs(e - e0) / e0);
  const int steps = static_cast<int>(cs.report.t.size()) - 1;

  const bool ok = u.report.preconditions_hold && u.report.monotone && zero <= 1e-12 && drift <= 1e-9 &&
                  steps >= 1000;
  return {ok, std::string("monotone ") + (u.report.monotone ? "yes" : "NO") + " (max step increase " +
                  fmt("%.1e", std::max(0.0, u.report.max_increase)) + "), homogeneous data " + fmt("%.0e", zero) +
                  " (<= 1e-12), conservative drift " + fmt("%.1e", drift) + " over " + std::to_string(steps) +
                  " steps (<= 1e-9)"};
}

Outcome solver() {
  using std::numbers::pi;
  Config w = load("standing_wave.yaml");
  w.scenario.integrator.t_final = 10.0;
  w.scenario.integrator.save_stride = 1;
  const Trajectory tr = run_simulation(w.scenario);
  const int mid = w.scenario.grid.n[0] / 3;
  std::vector<double> t, y;
  for (const auto& s : tr.states) {
    t.push_back(s.t);
    y.push_back(s.u.at(mid));
  }
  const auto zc = oracle::zero_crossings(t, y);
  const double period = zc.size() >= 2 ? 2.0 * (zc.back() - zc.front()) / (zc.size() - 1) : 0.0;
  const double ferr = period > 0 ? std::abs(2.0 * pi / period - pi) / pi : 1.0;

  double gauss = tr.max_gauss_residual;
  for (const char* name : {"coupled.yaml", "bar_two_loads.yaml", "biased_2d.yaml"})
    gauss = std::max(gauss, run_simulation(load(name).scenario).max_gauss_residual);

  const Config c = load("coupled.yaml");
  Scenario sa = c.scenario, sb = c.scenario, sab = c.scenario;
  sa.initial.u.push_back({SineProfile{{1, 1}}, {0.02}, ConstantSignal{}});
  sb.action = c.scenario.action.scaled(-0.7);
  sb.initial.theta.push_back({SineProfile{{2, 1}}, {0.05}, ConstantSignal{}});
  sab.action = sa.action.combined(sb.action);
  sab.initial.u = sa.initial.u;
  sab.initial.theta = sb.initial.theta;
  const Trajectory a = run_simulation(sa), b = run_simulation(sb), ab = run_simulation(sab);
  double err = 0.0, scale = 0.0;
  for (size_t i = 0; i < ab.states.size(); ++i)
    for (auto f : {&IncrementalState::u, &IncrementalState::v, &IncrementalState::phi, &IncrementalState::theta})
      for (size_t k = 0; k < (ab.states[i].*f).values.size(); ++k) {
        const double v = (ab.states[i].*f).values[k];
        err = std::max(err, std::abs((a.states[i].*f).values[k] + (b.states[i].*f).values[k] - v));
        scale = std::max(scale, std::abs(v));
      }
  const double sup = err / scale;
  const bool ok = ferr <= 0.02 && gauss <= 1e-10 && sup <= 1e-10;
  return {ok, "standing-wave frequency error " + fmt("%.2e", ferr) + " (<= 2%), max Gauss residual " +
                  fmt("%.1e", gauss) + " (<= 1e-10), superposition " + fmt("%.1e", sup) + " (<= 1e-10)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"tangent symmetry", tangent_symmetry},
      {"natural-state reduction", natural_state},
      {"energy balance", energy_balance},
      {"dissipation identity", dissipation},
      {"Hamilton identities", hamilton},
      {"reciprocity", reciprocity},
      {"uniqueness", uniqueness},
      {"solver verification", solver},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu %-24s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
