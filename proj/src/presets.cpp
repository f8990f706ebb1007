#include <algorithm>
#include <cmath>

#include "ramanopt/constants.hpp"
#include "ramanopt/runner.hpp"
#include "ramanopt/units.hpp"

namespace ramanopt {

namespace {

constexpr double kGamma = 3.4e6;  // common atomic decay/dephasing rate

AtomicConfig base_atomic(double g, double Omega_over_gamma, double eta) {
  AtomicConfig a;
  a.g1 = a.g2 = g;
  a.Omega = Omega_over_gamma * kGamma;
  a.Omega_p = 0.018 * kGamma;
  a.gamma_a = a.gamma_b = a.gamma_c = a.gamma_d = kGamma;
  a.gamma_ab = a.gamma_ac = a.gamma_ad = kGamma;
  a.gamma_bc = a.gamma_bd = a.gamma_cd = kGamma;
  a.Delta_1 = a.Delta_2 = a.Delta_c = 0;
  a.r_a = 1.6e6;
  a.eta = eta;
  return a;
}

SystemConfig base_system(double g, double Omega_over_gamma, double eta,
                         double P, double delta0, double n, double N) {
  SystemConfig cfg;
  cfg.atomic = base_atomic(g, Omega_over_gamma, eta);
  const double lam[2] = {810e-9, 1024e-9};
  const double len[2] = {112e-6, 88.6e-6};
  for (int j = 0; j < 2; ++j) {
    auto& c = cfg.cavity[j];
    c.nu = two_pi * c_light / lam[j];
    c.length = len[j];
    c.kappa = two_pi * 215e3;
    c.P = P;
    c.delta0 = j == 0 ? delta0 : -delta0;
    c.omega_L = c.nu - c.delta0;
    c.N = N;
    auto& m = cfg.mirror[j];
    m.mass = 145e-12;
    m.omega_m = two_pi * 3e6;
    m.gamma_m = two_pi * 60e6;
    m.n = n;
  }
  return cfg;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

nlohmann::json axisdesc(const std::string& name, const std::vector<double>& values) {
  return nlohmann::json{{"path", name}, {"values", values}};
}

void set_drive(SystemConfig& cfg, double P, double delta0) {
  for (int j = 0; j < 2; ++j) {
    auto& c = cfg.cavity[j];
    c.P = P;
    c.delta0 = j == 0 ? delta0 : -delta0;
    c.omega_L = c.nu - c.delta0;
  }
}

std::vector<std::string> bistability_rows(const SystemConfig& base,
                                          const SteadyStateParams& sp,
                                          const std::vector<double>& P_grid,
                                          double delta0, SteadyModel model,
                                          double mu) {
  std::vector<std::string> rows;
  const double omega_L = base.cavity[0].nu - delta0;
  for (double P : P_grid) {
    const double eps = std::sqrt(base.cavity[0].kappa * P / (hbar * omega_L));
    SolveResult r;
    if (model == SteadyModel::rwa) {
      const auto r1 = rwa_branches(sp, 1, delta0, eps);
      const auto r2 = rwa_branches(sp, 2, -delta0, mu * eps);
      for (const auto& b1 : r1.branches)
        for (const auto& b2 : r2.branches) {
          SteadyStateBranch b = b1;
          b.I2 = b2.I2;
          b.stable = (b1.stable == Stability::unstable ||
                      b2.stable == Stability::unstable)
                         ? Stability::unstable
                         : (b1.stable == Stability::stable &&
                            b2.stable == Stability::stable)
                               ? Stability::stable
                               : Stability::unknown;
          r.branches.push_back(b);
        }
      int id = 0;
      for (auto& b : r.branches) b.branch_id = id++;
    } else {
      r = brwa_mean_fields(sp, delta0, eps, mu);
    }
    for (const auto& b : r.branches)
      rows.push_back(format_sci(P) + "," + format_sci(delta0) + "," +
                     std::to_string(b.branch_id) + "," + format_sci(b.I1) +
                     "," + format_sci(b.I2) + "," + to_string(b.stable));
  }
  return rows;
}

// shared by the entanglement presets: one family axis, one curve per value
struct FamilyMember {
  double value;
  SystemConfig cfg;
};

OutputSet entanglement_family(const std::string& preset,
                              const std::string& axis_name,
                              const std::vector<FamilyMember>& members,
                              const RunManifest& manifest) {
  OutputSet out;
  std::vector<std::string> rows;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& mem : members) {
    DynamicsOptions dopt;
    const DynamicsRun run = run_dynamics(mem.cfg, dopt);
    const EntanglementSeries es = entanglement_series(run.traj);
    for (size_t i = 0; i < es.times.size(); ++i)
      rows.push_back(format_sci(mem.value) + "," + format_sci(es.times[i]) +
                     "," + format_sci(es.E_N[i]) + "," +
                     format_sci(es.eta_minus[i]));
    const double en_max =
        es.E_N.empty() ? 0.0 : *std::max_element(es.E_N.begin(), es.E_N.end());
    nlohmann::json revivals = nlohmann::json::array();
    for (auto& [a, b] : es.revivals) revivals.push_back({a, b});
    summary.push_back(
        {{axis_name, mem.value},
         {"death_time", es.death_time ? nlohmann::json(*es.death_time)
                                      : nlohmann::json()},
         {"E_N_max", en_max},
         {"alpha1", {run.coupling.alpha1.real(), run.coupling.alpha1.imag()}},
         {"alpha2", {run.coupling.alpha2.real(), run.coupling.alpha2.imag()}},
         {"I1", run.steady.branches[run.branch_index].I1},
         {"I2", run.steady.branches[run.branch_index].I2},
         {"revivals", revivals},
         {"warnings", run.coupling.warnings}});
  }
  out.add_csv(preset + "_entanglement.csv", manifest,
              axis_name + ",t,E_N,eta_minus", rows);
  out.add_json(preset + "_summary.json", manifest,
               nlohmann::json{{"curves", summary}});
  return out;
}

RunManifest preset_manifest(const std::string& name, const SystemConfig& cfg,
                            nlohmann::json flags, nlohmann::json axes) {
  RunManifest m;
  m.subcommand = "reproduce";
  m.config = config_to_json(cfg);
  flags["preset"] = name;
  m.flags = std::move(flags);
  m.axes = std::move(axes);
  return m;
}

}  // namespace

SystemConfig preset_base_config(const std::string& name) {
  const double g34 = two_pi * 3e6;  // Fig. 2/3 atom-field coupling
  const double g47 = two_pi * 4e6;  // Figs. 4-7
  const double wm = two_pi * 3e6;
  if (name == "fig2" || name == "fig3")
    return base_system(g34, 10.0, 1.0, 1e-3, two_pi * 3e6, 0.0, 0.0);
  if (name == "fig4")
    return base_system(g47, 15.0, 1.0, 0.02e-9, -wm, 50.0, 1.0);
  if (name == "fig5")
    return base_system(g47, 5.0, 1.0, 0.5e-9, -wm, 5.0, 1.0);
  if (name == "fig6")
    return base_system(g47, 5.0, 1.0, 0.02e-9, -wm, 5.0, 1.0);
  if (name == "fig7")
    return base_system(g47, 5.0, -1.0, 0.02e-9, -wm, 0.0, 5.0);
  throw ConfigError("unknown preset '" + name + "'");
}

OutputSet run_preset(const std::string& name, int jobs) {
  SystemConfig cfg = preset_base_config(name);

  if (name == "fig2") {
    // RWA phase diagram over (delta0, P) plus S-curve cross sections
    const auto d0_grid = linspace(-two_pi * 1e6, two_pi * 4e6, 100);
    const auto P_grid = linspace(0.0, 0.025, 100);
    RunManifest m = preset_manifest(
        name, cfg, {{"model", "rwa"}},
        nlohmann::json::array(
            {axisdesc("delta0", d0_grid), axisdesc("P", P_grid)}));
    const PhaseDiagram pd =
        phase_diagram(cfg, d0_grid, P_grid, SteadyModel::rwa, 0.0, jobs);
    OutputSet out;
    std::vector<std::string> rows;
    for (size_t i = 0; i < d0_grid.size(); ++i)
      for (size_t k = 0; k < P_grid.size(); ++k)
        rows.push_back(format_sci(d0_grid[i]) + "," + format_sci(P_grid[k]) +
                       "," + std::to_string(pd.cells[i * P_grid.size() + k].count));
    out.add_csv("fig2_phase.csv", m, "delta0,P,count", rows);

    const SteadyStateParams sp = steady_params(cfg);
    std::vector<std::string> cross;
    // cross sections at delta01 = 6pi, 4pi, 0 MHz
    for (double d0 : {two_pi * 3e6, two_pi * 2e6, 0.0}) {
      auto r = bistability_rows(cfg, sp, linspace(0.0, 0.025, 300), d0,
                                SteadyModel::rwa, 1.0);
      cross.insert(cross.end(), r.begin(), r.end());
    }
    out.add_csv("fig2_cross.csv", m, "P,delta0,branch_id,I1,I2,stable", cross);
    nlohmann::json cellj = nlohmann::json::array();
    for (const auto& c : pd.cells) cellj.push_back({c.count, c.I_min, c.I_max});
    out.add_json("fig2_sidecar.json", m,
                 {{"delta0_grid", d0_grid}, {"P_grid", P_grid},
                  {"cells", cellj}, {"diagnostics", pd.diagnostics}});
    return out;
  }

  if (name == "fig3") {
    const double mu = 0.1;
    RunManifest m = preset_manifest(name, cfg, {{"model", "brwa"}, {"mu", mu}},
                                    nlohmann::json::array());
    const SteadyStateParams sp = steady_params(cfg);
    OutputSet out;
    std::vector<std::string> rows;
    for (double d0_mhz : {6.0, 3.0, 1.0, 0.25}) {
      auto r = bistability_rows(cfg, sp, linspace(0.0, 0.025, 200),
                                two_pi * d0_mhz * 1e6, SteadyModel::brwa, mu);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    out.add_csv("fig3_cross.csv", m, "P,delta0,branch_id,I1,I2,stable", rows);
    return out;
  }

  if (name == "fig4") {
    std::vector<FamilyMember> fam;
    for (double om : {15.0, 20.0, 30.0}) {
      SystemConfig c = cfg;
      c.atomic.Omega = om * kGamma;
      fam.push_back({om, c});
    }
    RunManifest m = preset_manifest(name, cfg, {{"P", cfg.cavity[0].P}},
                                    nlohmann::json::array({axisdesc(
                                        "Omega_over_gamma", {15.0, 20.0, 30.0})}));
    return entanglement_family(name, "Omega_over_gamma", fam, m);
  }

  if (name == "fig5") {
    std::vector<FamilyMember> fam;
    for (double P : {0.5e-9, 0.05e-6, 0.5e-3}) {
      SystemConfig c = cfg;
      set_drive(c, P, c.cavity[0].delta0);
      fam.push_back({P, c});
    }
    RunManifest m = preset_manifest(
        name, cfg, {},
        nlohmann::json::array({axisdesc("P", {0.5e-9, 0.05e-6, 0.5e-3})}));
    return entanglement_family(name, "P", fam, m);
  }

  if (name == "fig6") {
    std::vector<FamilyMember> fam;
    for (double n : {5.0, 10.0, 50.0, 100.0}) {
      SystemConfig c = cfg;
      c.mirror[0].n = c.mirror[1].n = n;
      fam.push_back({n, c});
    }
    RunManifest m = preset_manifest(
        name, cfg, {},
        nlohmann::json::array({axisdesc("n", {5.0, 10.0, 50.0, 100.0})}));
    return entanglement_family(name, "n", fam, m);
  }

  if (name == "fig7") {
    std::vector<FamilyMember> fam;
    for (double N : {5.0, 50.0, 100.0}) {
      SystemConfig c = cfg;
      c.cavity[0].N = c.cavity[1].N = N;
      fam.push_back({N, c});
    }
    RunManifest m = preset_manifest(
        name, cfg, {},
        nlohmann::json::array({axisdesc("N", {5.0, 50.0, 100.0})}));
    return entanglement_family(name, "N", fam, m);
  }

  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace ramanopt
