// itee: run scenarios and the theorem checks from a YAML config.
// Exit status: 0 pass, 1 verification failed, 2 invalid input.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "itee/config.hpp"
#include "itee/errors.hpp"
#include "itee/pipelines.hpp"
#include "itee/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace itee;

namespace {

struct Options {
  std::string config;
  std::string out;
  int levels = 0;
  std::vector<double> p;
  unsigned seed = 1;
  bool seed_given = false;
  bool as_printed = false;
  double min_ratio = 1.8;
};

class Output {
 public:
  Output(const std::string& dir, const std::string& command, const Options& o, const Config& c)
      : dir_(dir) {
    fs::create_directories(dir_);
    manifest_["command"] = command;
    manifest_["config"] = o.config;
    manifest_["scenario"] = c.scenario.name;
    manifest_["seed"] = o.seed_given ? o.seed : c.verification.seed;
    manifest_["outputs"] = json::array();
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path target = fs::path(dir_) / name;
    fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream f(tmp);
      if (!f) throw ValidationError("cannot write " + tmp.string());
      f << content;
    }
    fs::rename(tmp, target);
    manifest_["outputs"].push_back(name);
  }

  json& results() { return manifest_["results"]; }

  void finish(bool pass) {
    manifest_["pass"] = pass;
    write("manifest.json", manifest_.dump(2) + "\n");
  }

 private:
  std::string dir_;
  json manifest_;
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

int cmd_simulate(const Options& o, const Config& c) {
  Output out(o.out, "simulate", o, c);
  const Scenario& sc = c.scenario;
  const auto disc = make_discretization(sc);
  const Trajectory tr = run_simulation(disc, sc.action, sc.initial, sc.integrator);
  json index = json::array();
  std::ostringstream ledger;
  ledger << "# itee-ledger-csv v1\nt,W_def,K_kin,P_heat,E_elec,C_coupling,total,dissipation\n";
  Series tot{"total", {}, {}}, noc{"total without coupling", {}, {}};
  const bool uniform = disc->bias().theta_uniform;
  for (const auto& s : tr.states) {
    const long step = std::lround(s.t / tr.dt);
    char name[64];
    std::snprintf(name, sizeof name, "fields/level_%06ld.csv", step);
    out.write(name, field_csv(disc->grid(), {{"u", &s.u}, {"v", &s.v}, {"phi", &s.phi},
                                             {"theta", &s.theta}}));
    json e{{"step", step}, {"time", s.t}, {"file", name}};
    if (step >= 1 && step <= static_cast<long>(tr.diagnostics.size()))
      e["gauss_residual"] = tr.diagnostics[step - 1].gauss_residual;
    index.push_back(e);
    if (uniform) {
      const EnergyLedger l = energy_functionals(*disc, s);
      ledger << num(s.t) << ',' << num(l.W_def) << ',' << num(l.K_kin) << ',' << num(l.P_heat)
             << ',' << num(l.E_elec) << ',' << num(l.C_coupling) << ',' << num(l.total()) << ','
             << num(l.dissipation()) << '\n';
      tot.x.push_back(s.t);
      tot.y.push_back(l.total());
      noc.x.push_back(s.t);
      noc.y.push_back(l.total_without_coupling());
    }
  }
  if (uniform) {
    out.write("ledger.csv", ledger.str());
    out.write("ledger.svg", svg_line_chart({tot, noc}, {"Energy ledger", "t", "energy"}));
  }
  const bool ok = tr.max_gauss_residual <= 1e-10;
  out.results() = {{"steps", tr.diagnostics.size()},
                   {"levels", index},
                   {"max_gauss_residual", tr.max_gauss_residual},
                   {"stability_warning", tr.stability_warning}};
  out.finish(ok);
  std::cout << "scenario            " << sc.name << "\n"
            << "steps               " << tr.diagnostics.size() << "\n"
            << "saved levels        " << tr.states.size() << "\n"
            << "max Gauss residual  " << sci(tr.max_gauss_residual) << "  " << verdict(ok) << "\n";
  if (tr.stability_warning)
    std::cout << "warning: dt exceeds h / c_max; the implicit scheme is stable but inaccurate\n";
  return ok ? 0 : 1;
}

json tensor_json(const EffectiveConstants& ec) {
  const int d = ec.dim;
  json G = json::array(), R = json::array(), Lam = json::array(), L = json::array(),
       P = json::array(), k2 = json::array();
  for (int K = 0; K < d; ++K) {
    json a = json::array(), r = json::array(), l = json::array(), lm = json::array(),
         kk = json::array();
    for (int al = 0; al < d; ++al) {
      json b = json::array(), rr = json::array();
      for (int Lx = 0; Lx < d; ++Lx) {
        json c = json::array();
        for (int g = 0; g < d; ++g) c.push_back(ec.G(K, al, Lx, g));
        b.push_back(c);
        rr.push_back(ec.R(K, al, Lx));
      }
      a.push_back(b);
      r.push_back(rr);
      l.push_back(ec.L(K, al));
      lm.push_back(ec.Lam(K, al));
      kk.push_back(ec.kap_2(K, al));
    }
    G.push_back(a);
    R.push_back(r);
    L.push_back(l);
    Lam.push_back(lm);
    k2.push_back(kk);
    P.push_back(ec.P(K));
  }
  return {{"G", G}, {"R", R}, {"Lam", Lam}, {"L", L}, {"P", P}, {"alpha", ec.alpha}, {"kap_2", k2}};
}

int cmd_constants(const Options& o, const Config& c) {
  Output out(o.out, "constants", o, c);
  const Scenario& sc = c.scenario;
  const Grid g(sc.grid);
  const BiasState b = build_bias_state(sc.material, sc.bias, g);
  const EffectiveConstants ec = effective_constants_at(sc.material, b, Vec{});
  const int d = ec.dim;
  const SymmetryReport sym = check_symmetries(ec);

  std::ostringstream csv;
  csv << "# itee-constants-csv v1\nname,indices,value\n";
  auto row = [&](const std::string& n, const std::string& idx, double v) {
    csv << n << ',' << idx << ',' << num(v) << '\n';
    std::printf("  %-6s %-8s % .6e\n", n.c_str(), idx.c_str(), v);
  };
  std::printf("effective constants at X = 0 (theta = %g)\n", b.theta(Vec{}));
  for (int K = 0; K < d; ++K)
    for (int a = 0; a < d; ++a)
      for (int L = 0; L < d; ++L)
        for (int gm = 0; gm < d; ++gm)
          row("G", std::to_string(K + 1) + std::to_string(a + 1) + std::to_string(L + 1) +
                       std::to_string(gm + 1),
              ec.G(K, a, L, gm));
  for (int K = 0; K < d; ++K)
    for (int L = 0; L < d; ++L)
      for (int gm = 0; gm < d; ++gm)
        row("R", std::to_string(K + 1) + std::to_string(L + 1) + std::to_string(gm + 1),
            ec.R(K, L, gm));
  for (int M = 0; M < d; ++M)
    for (int a = 0; a < d; ++a) row("Lam", std::to_string(M + 1) + std::to_string(a + 1), ec.Lam(M, a));
  for (int M = 0; M < d; ++M)
    for (int N = 0; N < d; ++N) row("L", std::to_string(M + 1) + std::to_string(N + 1), ec.L(M, N));
  for (int M = 0; M < d; ++M)
    for (int N = 0; N < d; ++N) row("l_corr", std::to_string(M + 1) + std::to_string(N + 1), ec.l_corr(M, N));
  for (int M = 0; M < d; ++M) row("P", std::to_string(M + 1), ec.P(M));
  row("alpha", "-", ec.alpha);
  for (int M = 0; M < d; ++M)
    for (int N = 0; N < d; ++N) row("kap_2", std::to_string(M + 1) + std::to_string(N + 1), ec.kap_2(M, N));
  out.write("constants.csv", csv.str());

  json res = tensor_json(ec);
  res["g_asymmetry"] = sym.g_asymmetry;
  res["l_asymmetry"] = sym.l_asymmetry;
  res["equilibrium_residual"] = {b.residual_momentum, b.residual_gauss, b.residual_heat};
  std::printf("symmetry            G %.3e  L %.3e  %s\n", sym.g_asymmetry, sym.l_asymmetry,
              verdict(sym.pass));
  std::printf("bias residuals      momentum %.3e  Gauss %.3e  heat %.3e\n", b.residual_momentum,
              b.residual_gauss, b.residual_heat);
  std::printf("min eig of G        % .6e\n", min_eigenvalue_G(ec));
  try {
    const IgnaczakReport ig = ignaczak_condition(ec, sc.material.rho0, b.theta(Vec{}));
    res["ignaczak"] = {{"holds", ig.holds}, {"lambda_m", ig.lambda_m}, {"c", ig.c}, {"gnorm", ig.gnorm}};
    std::printf("Ignaczak            |g| %.4e <= c lambda_m %.4e  %s\n", ig.gnorm, ig.c * ig.lambda_m,
                ig.holds ? "holds" : "fails");
  } catch (const NotPositiveDefinite&) {
    res["ignaczak"] = "L not positive definite";
    std::printf("Ignaczak            L not positive definite\n");
  }
  out.results() = res;
  out.finish(sym.pass);
  return sym.pass ? 0 : 1;
}

int cmd_energy(const Options& o, const Config& c) {
  Output out(o.out, "verify-energy", o, c);
  const int levels = o.levels > 0 ? o.levels : c.verification.levels;
  const EnergyStudy s = energy_study(c, levels);
  std::ostringstream conv;
  conv << "# itee-energy-convergence-csv v1\ndt,residual_norm,order\n";
  std::printf("%-12s %-14s %s\n", "dt", "residual RMS", "order");
  for (size_t k = 0; k < s.dt.size(); ++k) {
    const std::string ord = k == 0 ? "" : num(s.order[k - 1]);
    conv << num(s.dt[k]) << ',' << num(s.residual_norm[k]) << ',' << ord << '\n';
    if (k == 0)
      std::printf("%-12g %-14.4e -\n", s.dt[k], s.residual_norm[k]);
    else
      std::printf("%-12g %-14.4e %.3f\n", s.dt[k], s.residual_norm[k], s.order[k - 1]);
  }
  out.write("energy_convergence.csv", conv.str());
  out.write("energy_convergence.svg",
            svg_line_chart({{"residual RMS", s.dt, s.residual_norm}},
                           {"Energy balance residual", "dt", "RMS residual", true, true}));
  std::ostringstream led;
  led << "# itee-ledger-csv v1\nt,W_def,K_kin,P_heat,E_elec,C_coupling,chi,chi_theta,chi_phi,chi_u,"
         "power,residual\n";
  Series tot{"total", {}, {}};
  for (const auto& l : s.finest.ledger) {
    led << num(l.t) << ',' << num(l.W_def) << ',' << num(l.K_kin) << ',' << num(l.P_heat) << ','
        << num(l.E_elec) << ',' << num(l.C_coupling) << ',' << num(l.chi) << ','
        << num(l.chi_theta) << ',' << num(l.chi_phi) << ',' << num(l.chi_u) << ','
        << num(l.rhs_power) << ',' << num(l.residual) << '\n';
    tot.x.push_back(l.t);
    tot.y.push_back(l.total());
  }
  out.write("ledger.csv", led.str());
  out.write("ledger.svg", svg_line_chart({tot}, {"Energy ledger (finest dt)", "t", "energy"}));
  if (s.exact)
    std::printf("balance exact to roundoff on every level; order not meaningful  PASS\n");
  else
    std::printf("min order           %.3f (>= 0.9)  %s\n", s.min_order,
                verdict(levels < 2 || s.min_order >= 0.9));
  if (s.homogeneous)
    std::printf("max step increase   %.3e of initial total (<= 1e-10)  %s\n", s.max_increase,
                verdict(s.max_increase <= 1e-10));
  std::printf("dissipation identity max residual %.3e over %d states  %s\n",
              s.dissipation_max_residual, s.dissipation_samples, verdict(s.dissipation_ok));
  out.results() = {{"dt", s.dt},
                   {"residual_norm", s.residual_norm},
                   {"order", s.order},
                   {"min_order", s.order.empty() ? json() : json(s.min_order)},
                   {"exact_to_roundoff", s.exact},
                   {"homogeneous", s.homogeneous},
                   {"max_increase", s.max_increase},
                   {"dissipation_max_residual", s.dissipation_max_residual}};
  out.finish(s.pass);
  std::printf("verify-energy       %s\n", verdict(s.pass));
  return s.pass ? 0 : 1;
}

int cmd_uniqueness(const Options& o, const Config& c) {
  Output out(o.out, "verify-uniqueness", o, c);
  const UniquenessStudy s = uniqueness_study(c);
  const auto& r = s.report;
  std::ostringstream csv;
  csv << "# itee-uniqueness-csv v1\nt,total,total_without_coupling\n";
  for (size_t i = 0; i < r.t.size(); ++i)
    csv << num(r.t[i]) << ',' << num(r.total[i]) << ',' << num(r.total_no_coupling[i]) << '\n';
  out.write("uniqueness.csv", csv.str());
  out.write("uniqueness.svg",
            svg_line_chart({{"total", r.t, r.total}, {"without coupling", r.t, r.total_no_coupling}},
                           {"Difference energy", "t", "energy"}));
  std::printf("hypotheses          %s\n", r.note.c_str());
  std::printf("min eig of G        % .4e\n", r.g_min_eig);
  std::printf("Ignaczak            |g| %.4e, c lambda_m %.4e\n", r.ignaczak.gnorm,
              r.ignaczak.c * r.ignaczak.lambda_m);
  std::printf("max step increase   %.3e (with coupling)  %s\n", r.max_increase, verdict(r.monotone));
  std::printf("max step increase   %.3e (without coupling)  %s\n", r.max_increase_no_coupling,
              r.monotone_no_coupling ? "monotone" : "not monotone");
  std::printf("final / initial     %.6f\n", r.final_ratio);
  out.results() = {{"preconditions_hold", r.preconditions_hold},
                   {"note", r.note},
                   {"g_min_eig", r.g_min_eig},
                   {"max_increase", r.max_increase},
                   {"max_increase_no_coupling", r.max_increase_no_coupling},
                   {"monotone", r.monotone},
                   {"monotone_no_coupling", r.monotone_no_coupling},
                   {"final_ratio", r.final_ratio}};
  out.finish(s.pass);
  std::printf("verify-uniqueness   %s\n", s.pass ? "PASS" : (r.preconditions_hold ? "FAIL" : "INCONCLUSIVE"));
  return s.pass ? 0 : 1;
}

int cmd_hamilton(const Options& o, const Config& c) {
  Output out(o.out, "verify-hamilton", o, c);
  const unsigned seed = o.seed_given ? o.seed : c.verification.seed;
  const HamiltonStudy s = hamilton_study(c, seed);
  std::printf("density identities  K %.2e  Delta %.2e  eta %.2e  Q %.2e  %s\n", s.density.err_K,
              s.density.err_Delta, s.density.err_eta, s.density.err_Q, verdict(s.density.pass));
  std::ostringstream csv;
  csv << "# itee-hamilton-csv v1\nt,el_vs_field,field_norm,psi_norm,heat_norm,perturbed_el_vs_field,"
         "perturbed_field_norm,injected_psi_norm,injected_defect_error\n";
  std::printf("%-8s %-12s %-12s %-12s %-12s %-12s %-12s\n", "t", "EL-field", "field", "psi", "heat",
              "inj psi", "inj defect");
  for (const auto& h : s.checks) {
    csv << num(h.t) << ',' << num(h.fourier.el_vs_field) << ',' << num(h.fourier.field_norm) << ','
        << num(h.fourier.psi_norm) << ',' << num(h.fourier.heat_norm) << ','
        << num(h.perturbed.el_vs_field) << ',' << num(h.perturbed.field_norm) << ','
        << (s.injection ? num(h.injected.psi_norm) : "") << ','
        << (s.injection ? num(h.injected.defect_error) : "") << '\n';
    std::printf("%-8g %-12.3e %-12.3e %-12.3e %-12.3e %-12s %-12s\n", h.t, h.fourier.el_vs_field,
                h.fourier.field_norm, h.fourier.psi_norm, h.fourier.heat_norm,
                s.injection ? sci(h.injected.psi_norm).c_str() : "-",
                s.injection ? sci(h.injected.defect_error).c_str() : "-");
  }
  out.write("hamilton.csv", csv.str());
  out.results() = {{"seed", seed},
                   {"density_max_error", s.density.max_error},
                   {"max_el_vs_field", s.max_el_vs_field},
                   {"max_field_norm", s.max_field_norm},
                   {"max_psi_norm", s.max_psi_norm},
                   {"max_heat_norm", s.max_heat_norm},
                   {"min_perturbed_field_norm", s.min_perturbed_field_norm},
                   {"injection", s.injection},
                   {"max_defect_error", s.max_defect_error},
                   {"min_injected_psi_norm", s.min_injected_psi_norm}};
  out.finish(s.pass);
  std::printf("verify-hamilton     %s\n", verdict(s.pass));
  return s.pass ? 0 : 1;
}

int cmd_reciprocity(const Options& o, const Config& c) {
  Output out(o.out, "verify-reciprocity", o, c);
  const int levels = o.levels > 0 ? o.levels : c.verification.levels;
  const std::vector<double> p = o.p.empty() ? c.verification.p : o.p;
  const ReciprocityStudy s = reciprocity_study(c, p, levels, o.as_printed);
  std::ostringstream terms, summary;
  terms << "# itee-reciprocity-terms-csv v1\nlevel,nodes,dt,p,term,value\n";
  summary << "# itee-reciprocity-csv v1\nlevel,nodes,dt,p,total,normalization,relative\n";
  std::vector<Series> series;
  std::printf("%-6s %-6s %-10s %-6s %-12s %s\n", "level", "nodes", "dt", "p", "relative", "<= 1e-3");
  for (size_t k = 0; k < s.levels.size(); ++k) {
    const auto& lv = s.levels[k];
    Series sr{"level " + std::to_string(k), {}, {}};
    for (const auto& r : lv.reports) {
      for (const auto& [name, v] : r.terms)
        terms << k << ',' << lv.nodes << ',' << num(lv.dt) << ',' << num(r.p) << ',' << name << ','
              << num(v) << '\n';
      summary << k << ',' << lv.nodes << ',' << num(lv.dt) << ',' << num(r.p) << ','
              << num(r.total) << ',' << num(r.normalization) << ',' << num(r.relative) << '\n';
      std::printf("%-6zu %-6d %-10g %-6g %-12.3e %s\n", k, lv.nodes, lv.dt, r.p, r.relative,
                  verdict(r.relative <= 1e-3));
      sr.x.push_back(r.p);
      sr.y.push_back(r.relative);
    }
    std::printf("       swap antisymmetry error %.1e, identical-loadings total %.1e\n",
                lv.max_swap_error, lv.max_identical);
    series.push_back(sr);
  }
  std::printf("decreasing under refinement  %s\n", s.levels.size() < 2 ? "n/a" : verdict(s.decreasing));
  out.write("reciprocity_terms.csv", terms.str());
  out.write("reciprocity.csv", summary.str());
  out.write("reciprocity.svg", svg_line_chart(series, {"Reciprocity residual", "p", "relative residual",
                                                       true, true}));
  json lv = json::array();
  for (const auto& l : s.levels) {
    json rel = json::array();
    for (const auto& r : l.reports) rel.push_back(r.relative);
    lv.push_back({{"nodes", l.nodes}, {"dt", l.dt}, {"relative", rel},
                  {"swap_error", l.max_swap_error}, {"identical_total", l.max_identical}});
  }
  out.results() = {{"p", s.p}, {"levels", lv}, {"decreasing", s.decreasing},
                   {"max_relative", s.max_relative},
                   {"electric_surface_as_printed", o.as_printed}};
  out.finish(s.pass);
  std::printf("verify-reciprocity  %s\n", verdict(s.pass));
  return s.pass ? 0 : 1;
}

int cmd_converge(const Options& o, const Config& c) {
  Output out(o.out, "converge", o, c);
  const int levels = o.levels > 0 ? o.levels : std::max(3, c.verification.levels);
  const ConvergenceStudy s = convergence_study(c, levels, o.min_ratio);
  std::ostringstream csv;
  csv << "# itee-convergence-csv v1\ndt,difference_to_next,ratio\n";
  std::printf("%-12s %-16s %s\n", "dt", "|u_k - u_k+1|", "ratio");
  for (size_t k = 0; k < s.difference.size(); ++k) {
    const std::string ratio = k == 0 ? "" : num(s.ratio[k - 1]);
    csv << num(s.dt[k]) << ',' << num(s.difference[k]) << ',' << ratio << '\n';
    if (k == 0)
      std::printf("%-12g %-16.4e -\n", s.dt[k], s.difference[k]);
    else
      std::printf("%-12g %-16.4e %.3f\n", s.dt[k], s.difference[k], s.ratio[k - 1]);
  }
  out.write("convergence.csv", csv.str());
  out.write("convergence.svg",
            svg_line_chart({{"difference", std::vector<double>(s.dt.begin(), s.dt.end() - 1), s.difference}},
                           {"Time-step self-convergence", "dt", "max |u_k - u_k+1|", true, true}));
  out.results() = {{"dt", s.dt}, {"difference", s.difference}, {"ratio", s.ratio},
                   {"min_ratio", s.min_ratio}};
  out.finish(s.pass);
  std::printf("min ratio           %.3f (>= %.2f)  %s\n", s.min_ratio, o.min_ratio, verdict(s.pass));
  return s.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental thermoelectroelasticity about biasing fields: simulation and theorem checks"};
  app.require_subcommand(1);
  Options o;
  using Handler = int (*)(const Options&, const Config&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", o.config, "scenario YAML file")->required();
    s->add_option("--out", o.out, "output directory (default out/<command>)");
    s->add_option("--levels", o.levels, "refinement levels (default from the config)")
        ->check(CLI::PositiveNumber);
    s->add_option("--p", o.p, "Laplace parameters in units of 1/t_char")->delimiter(',');
    s->add_option_function<unsigned>(
        "--seed",
        [&](unsigned v) {
          o.seed = v;
          o.seed_given = true;
        },
        "seed for random test states");
    commands.emplace_back(s, h);
    return s;
  };
  add("simulate", "run the scenario and export fields", cmd_simulate);
  add("constants", "print the effective constants of the bias state", cmd_constants);
  add("verify-energy", "energy balance refinement study and dissipation identity", cmd_energy);
  add("verify-uniqueness", "difference-energy decay of two runs", cmd_uniqueness);
  add("verify-hamilton", "variational identities on the discrete solution", cmd_hamilton);
  add("verify-reciprocity", "Laplace-domain reciprocity between two loadings", cmd_reciprocity)
      ->add_flag("--electric-surface-as-printed", o.as_printed,
                 "use the alternative sign of the surface-charge pair");
  add("converge", "time-step self-convergence of the displacement", cmd_converge)
      ->add_option("--min-ratio", o.min_ratio, "required error reduction per halving");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    if (o.out.empty()) o.out = "out/" + sub->get_name();
    try {
      const Config c = parse_config(o.config);
      return handler(o, c);
    } catch (const ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}
