#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ramanopt/constants.hpp"
#include "ramanopt/entanglement.hpp"
#include "ramanopt/runner.hpp"
#include "ramanopt/units.hpp"

using namespace ramanopt;

namespace {

struct GridSpec {
  double start = 0, stop = 0;
  int n = 0;
  bool log = false;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char logtag[8] = {0};
  const int got = std::sscanf(s.c_str(), "%lf:%lf:%d:%3s", &g.start, &g.stop, &g.n, logtag);
  if (got < 3 || g.n < 1)
    throw ConfigError("grid must be 'start:stop:count[:log]', got '" + s + "'");
  g.log = got == 4 && std::string(logtag) == "log";
  if (g.log && (g.start <= 0 || g.stop <= 0))
    throw ConfigError("log grid needs positive endpoints");
  return g;
}

std::vector<double> expand(const GridSpec& g) {
  std::vector<double> v(g.n);
  if (g.n == 1) {
    v[0] = g.start;
    return v;
  }
  for (int i = 0; i < g.n; ++i) {
    const double f = static_cast<double>(i) / (g.n - 1);
    v[i] = g.log ? g.start * std::pow(g.stop / g.start, f)
                 : g.start + (g.stop - g.start) * f;
  }
  return v;
}

nlohmann::json cplx_json(const cplx& z) {
  return nlohmann::json{{"re", z.real()}, {"im", z.imag()}};
}

void emit(const OutputSet& out, const std::string& dir, bool verify) {
  if (verify) {
    const auto bad = out.verify_against(dir);
    if (!bad.empty()) {
      for (const auto& n : bad) std::cerr << "verify mismatch: " << n << "\n";
      std::exit(1);
    }
    std::cout << "verify ok (" << out.files.size() << " files)\n";
  } else {
    out.write(dir);
    for (const auto& [name, _] : out.files) std::cout << dir << "/" << name << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-mode Raman-laser optomechanics simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", model = "brwa", grid_spec, manifest_path;
  std::string preset;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  double tol = 0, mu = -1, delta0_override = std::nan("");
  double t_end = 0, dt = 0;
  int branch = -1;
  bool log2_flag = false, verify = false;

  app.add_option("--jobs", jobs, "worker threads for sweeps");

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "config JSON file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--tol", tol, "solver tolerance override");
    return cmd;
  };

  auto* c_gain = add_common(app.add_subcommand("gain", "print gain coefficients"), true);

  auto* c_bist = add_common(
      app.add_subcommand("bistability", "steady-state branches vs pump power"), true);
  c_bist->add_option("--model", model, "rwa|brwa");
  c_bist->add_option("--mu", mu, "drive ratio |eps2|/|eps1|");
  c_bist->add_option("--grid", grid_spec, "P grid 'start:stop:count[:log]' (W)")
      ->required();
  c_bist->add_option("--delta0", delta0_override, "delta01 override (rad/s)");

  auto* c_phase = add_common(
      app.add_subcommand("phase-diagram", "steady-solution count over (delta0, P)"), true);
  std::string grid_d0_spec;
  c_phase->add_option("--model", model, "rwa|brwa");
  c_phase->add_option("--mu", mu, "drive ratio |eps2|/|eps1|");
  c_phase->add_option("--grid", grid_spec, "P grid 'start:stop:count[:log]' (W)")
      ->required();
  c_phase->add_option("--grid-delta0", grid_d0_spec,
                      "delta0 grid 'start:stop:count' (rad/s)")->required();

  auto* c_dyn = add_common(
      app.add_subcommand("dynamics", "propagate the mirror covariance matrix"), true);
  c_dyn->add_option("--t-end", t_end, "horizon (s)");
  c_dyn->add_option("--dt", dt, "step (s)");
  c_dyn->add_option("--mu", mu, "drive ratio override");
  c_dyn->add_option("--branch", branch, "steady branch index");

  auto* c_ent = add_common(
      app.add_subcommand("entanglement", "logarithmic negativity of the mirrors"), false);
  std::string in_csv;
  c_ent->add_option("--in", in_csv, "dynamics CSV to consume (else end-to-end)");
  c_ent->add_option("--t-end", t_end, "horizon (s)");
  c_ent->add_option("--dt", dt, "step (s)");
  c_ent->add_option("--mu", mu, "drive ratio override");
  c_ent->add_option("--branch", branch, "steady branch index");
  c_ent->add_flag("--log2", log2_flag, "report E_N in bits instead of nats");

  auto* c_rep = app.add_subcommand("reproduce", "figure-reproduction presets");
  c_rep->add_option("preset", preset, "fig2|fig3|fig4|fig5|fig6|fig7")->required();
  c_rep->add_option("--out", out_dir, "output directory");
  c_rep->add_flag("--verify", verify, "re-derive outputs and byte-compare");

  auto* c_sweep = app.add_subcommand("sweep", "cartesian sweep from a manifest");
  c_sweep->add_option("manifest", manifest_path, "sweep manifest JSON")->required();
  c_sweep->add_option("--out", out_dir, "output directory");
  c_sweep->add_flag("--verify", verify, "re-derive outputs and byte-compare");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_gain->parsed()) {
      const SystemConfig cfg = load_config(config_path);
      const GainCoefficients gc = compute_xi(cfg.atomic);
      const auto er = effective_rates(gc, cfg.cavity[0].kappa, cfg.cavity[1].kappa);
      nlohmann::json j;
      for (int i = 0; i < 8; ++i) j["xi" + std::to_string(i + 1)] = cplx_json(gc.xi[i]);
      j["xi11"] = cplx_json(gc.xi11);
      j["xi12"] = cplx_json(gc.xi12);
      j["xi21"] = cplx_json(gc.xi21);
      j["xi22"] = cplx_json(gc.xi22);
      j["eta1"] = cplx_json(gc.eta1);
      j["eta2"] = cplx_json(gc.eta2);
      j["kappa_p1"] = cplx_json(er.kappa_p1);
      j["kappa_p2"] = cplx_json(er.kappa_p2);
      j["kappa_combined"] = cplx_json(er.kappa_combined);
      j["unit"] = "rad/s";
      std::cout << j.dump(2) << "\n";
      return exit_ok;
    }

    if (c_bist->parsed()) {
      const SystemConfig cfg = load_config(config_path);
      const DerivedParams der = derive_params(cfg);
      const SteadyStateParams sp = steady_params(cfg, der);
      const double d0 = std::isnan(delta0_override) ? cfg.cavity[0].delta0
                                                    : delta0_override;
      const double omega_L = cfg.cavity[0].nu - d0;
      const double mu_eff = mu >= 0 ? mu
                            : der.epsilon[0] > 0 ? der.epsilon[1] / der.epsilon[0]
                                                 : 0.0;
      RunManifest m;
      m.subcommand = "bistability";
      m.config = config_to_json(cfg);
      m.flags = {{"model", model}, {"mu", mu_eff}, {"delta0", d0}, {"grid", grid_spec}};
      std::vector<std::string> rows;
      int failures = 0;
      for (double P : expand(parse_grid(grid_spec))) {
        const double eps = std::sqrt(cfg.cavity[0].kappa * P / (hbar * omega_L));
        SolveResult r;
        if (model == "rwa") {
          const auto r1 = rwa_branches(sp, 1, d0, eps);
          const auto r2 = rwa_branches(sp, 2, -d0, mu_eff * eps);
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
          r = brwa_mean_fields(sp, d0, eps, mu_eff);
        }
        if (r.branches.empty()) ++failures;
        for (const auto& b : r.branches)
          rows.push_back(format_sci(P) + "," + format_sci(d0) + "," +
                         std::to_string(b.branch_id) + "," + format_sci(b.I1) +
                         "," + format_sci(b.I2) + "," + to_string(b.stable));
      }
      OutputSet out;
      out.add_csv("bistability.csv", m, "P,delta0,branch_id,I1,I2,stable", rows);
      emit(out, out_dir, false);
      return failures == 0 ? exit_ok : exit_partial;
    }

    if (c_phase->parsed()) {
      const SystemConfig cfg = load_config(config_path);
      const double mu_eff = mu >= 0 ? mu : 1.0;
      const auto d0g = expand(parse_grid(grid_d0_spec));
      const auto Pg = expand(parse_grid(grid_spec));
      const PhaseDiagram pd = phase_diagram(
          cfg, d0g, Pg, model == "rwa" ? SteadyModel::rwa : SteadyModel::brwa,
          mu_eff, jobs);
      RunManifest m;
      m.subcommand = "phase-diagram";
      m.config = config_to_json(cfg);
      m.flags = {{"model", model}, {"mu", mu_eff},
                 {"grid", grid_spec}, {"grid_delta0", grid_d0_spec}};
      std::vector<std::string> rows;
      for (size_t i = 0; i < d0g.size(); ++i)
        for (size_t k = 0; k < Pg.size(); ++k)
          rows.push_back(format_sci(d0g[i]) + "," + format_sci(Pg[k]) + "," +
                         std::to_string(pd.cells[i * Pg.size() + k].count));
      OutputSet out;
      out.add_csv("phase_diagram.csv", m, "delta0,P,count", rows);
      nlohmann::json cellj = nlohmann::json::array();
      for (const auto& c : pd.cells) cellj.push_back({c.count, c.I_min, c.I_max});
      out.add_json("phase_diagram_sidecar.json", m,
                   {{"delta0_grid", d0g}, {"P_grid", Pg}, {"cells", cellj},
                    {"diagnostics", pd.diagnostics}});
      emit(out, out_dir, false);
      return pd.diagnostics.empty() ? exit_ok : exit_partial;
    }

    if (c_dyn->parsed() || (c_ent->parsed() && in_csv.empty())) {
      const SystemConfig cfg = load_config(config_path);
      DynamicsOptions dopt;
      dopt.t_end = t_end;
      dopt.dt = dt;
      dopt.mu = mu;
      dopt.branch = branch;
      if (tol > 0) dopt.halving_tol = tol;
      const DynamicsRun run = run_dynamics(cfg, dopt);
      for (const auto& w : run.coupling.warnings) std::cerr << "warning: " << w << "\n";

      RunManifest m;
      m.subcommand = c_dyn->parsed() ? "dynamics" : "entanglement";
      m.config = config_to_json(cfg);
      m.flags = {{"t_end", run.traj.times.back()}, {"dt", run.traj.dt},
                 {"mu", run.mu}, {"branch", run.branch_index},
                 {"log2", log2_flag}};
      OutputSet out;
      nlohmann::json side{
          {"alpha1", cplx_json(run.coupling.alpha1)},
          {"alpha2", cplx_json(run.coupling.alpha2)},
          {"kappa_p1", cplx_json(run.coupling.kappa_p1)},
          {"kappa_p2", cplx_json(run.coupling.kappa_p2)},
          {"kappa_combined", cplx_json(run.coupling.kappa_combined)},
          {"I1", run.steady.branches[run.branch_index].I1},
          {"I2", run.steady.branches[run.branch_index].I2},
          {"warnings", run.coupling.warnings}};

      if (c_dyn->parsed()) {
        std::vector<std::string> rows;
        for (size_t i = 0; i < run.traj.times.size(); ++i) {
          const auto& V = run.traj.V[i];
          std::string row = format_sci(run.traj.times[i]);
          for (int r = 0; r < 4; ++r)
            for (int c = r; c < 4; ++c) row += "," + format_sci(V(r, c));
          rows.push_back(row);
        }
        out.add_csv("dynamics.csv", m,
                    "t,V11,V12,V13,V14,V22,V23,V24,V33,V34,V44", rows);
        out.add_json("dynamics_sidecar.json", m, side);
      } else {
        const EntanglementSeries es = entanglement_series(run.traj);
        const double conv = log2_flag ? 1.4426950408889634 : 1.0;
        std::vector<std::string> rows;
        for (size_t i = 0; i < es.times.size(); ++i)
          rows.push_back(format_sci(es.times[i]) + "," +
                         format_sci(conv * es.E_N[i]) + "," +
                         format_sci(es.eta_minus[i]));
        out.add_csv("entanglement.csv", m, "t,E_N,eta_minus", rows);
        side["death_time"] = es.death_time ? nlohmann::json(*es.death_time)
                                           : nlohmann::json();
        nlohmann::json revivals = nlohmann::json::array();
        for (auto& [a, b] : es.revivals) revivals.push_back({a, b});
        side["revivals"] = revivals;
        out.add_json("entanglement_summary.json", m, side);
      }
      emit(out, out_dir, false);
      return exit_ok;
    }

    if (c_ent->parsed()) {  // consume a dynamics CSV
      std::ifstream in(in_csv);
      if (!in) throw ConfigError("cannot open '" + in_csv + "'");
      RunManifest m;
      m.subcommand = "entanglement";
      m.flags = {{"in", in_csv}, {"log2", log2_flag}};
      m.config = nlohmann::json::object();
      std::string line;
      CovarianceTrajectory traj;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::istringstream iss(line);
        std::vector<double> v;
        std::string tok;
        while (std::getline(iss, tok, ',')) v.push_back(std::stod(tok));
        if (v.size() != 11)
          throw ConfigError("dynamics CSV row needs 11 columns, got " +
                            std::to_string(v.size()));
        Eigen::Matrix4d V;
        int k = 1;
        for (int r = 0; r < 4; ++r)
          for (int c = r; c < 4; ++c) {
            V(r, c) = V(c, r) = v[k];
            ++k;
          }
        traj.times.push_back(v[0]);
        traj.V.push_back(V);
      }
      const EntanglementSeries es = entanglement_series(traj);
      const double conv = log2_flag ? 1.4426950408889634 : 1.0;
      std::vector<std::string> rows;
      for (size_t i = 0; i < es.times.size(); ++i)
        rows.push_back(format_sci(es.times[i]) + "," +
                       format_sci(conv * es.E_N[i]) + "," +
                       format_sci(es.eta_minus[i]));
      OutputSet out;
      out.add_csv("entanglement.csv", m, "t,E_N,eta_minus", rows);
      nlohmann::json side{{"death_time", es.death_time
                                             ? nlohmann::json(*es.death_time)
                                             : nlohmann::json()}};
      out.add_json("entanglement_summary.json", m, side);
      emit(out, out_dir, false);
      return exit_ok;
    }

    if (c_rep->parsed()) {
      const OutputSet out = run_preset(preset, jobs);
      emit(out, out_dir, verify);
      return exit_ok;
    }

    if (c_sweep->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw ConfigError("cannot open manifest '" + manifest_path + "'");
      nlohmann::json doc;
      in >> doc;
      const SweepResult res = run_sweep(doc, jobs);
      emit(res.outputs, out_dir, verify);
      return res.n_failed == 0 ? exit_ok : exit_partial;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_ok;
}
