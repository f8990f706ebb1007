#include "ramanopt/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ramanopt/constants.hpp"
#include "ramanopt/units.hpp"

namespace ramanopt {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", v);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"artifact_version", artifact_version},
                        {"subcommand", subcommand},
                        {"config", config},
                        {"flags", flags},
                        {"axes", axes},
                        {"seed", seed}};
}

std::string RunManifest::hash_hex() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

void OutputSet::add_csv(const std::string& name, const RunManifest& m,
                        const std::string& header,
                        const std::vector<std::string>& rows) {
  std::string body = "# manifest=" + m.hash_hex() + "\n" + header + "\n";
  for (const auto& r : rows) {
    body += r;
    body += '\n';
  }
  files[name] = std::move(body);
}

void OutputSet::add_json(const std::string& name, const RunManifest& m,
                         nlohmann::json body) {
  body["manifest_hash"] = m.hash_hex();
  body["manifest"] = m.to_json();
  files[name] = body.dump(2) + "\n";
}

void OutputSet::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, bytes] : files) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
}

std::vector<std::string> OutputSet::verify_against(const std::string& dir) const {
  std::vector<std::string> mismatched;
  for (const auto& [name, bytes] : files) {
    std::ifstream in(std::filesystem::path(dir) / name, std::ios::binary);
    if (!in) {
      mismatched.push_back(name + " (missing)");
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str() != bytes) mismatched.push_back(name);
  }
  return mismatched;
}

SteadyStateBranch brwa_from_rwa_seed(const SteadyStateParams& p, double delta0,
                                     double epsilon, double mu) {
  auto pick = [](const SolveResult& r) -> double {
    for (const auto& b : r.branches)
      if (b.stable == Stability::stable) return std::max(b.I1, b.I2);
    return r.branches.empty() ? 0.0 : std::max(r.branches.front().I1,
                                               r.branches.front().I2);
  };
  const double I1 = pick(rwa_branches(p, 1, delta0, epsilon));
  const double I2 = pick(rwa_branches(p, 2, -delta0, mu * epsilon));

  // damped self-consistent iteration of the coupled mean-field relations
  const cplx C = p.gain.xi12 * std::conj(p.gain.xi21);
  auto a1 = [&](double x) {
    return cplx(0, 1) * (delta0 - p.beta1 * x) + p.kappa1 / 2.0 - p.gain.eta1;
  };
  auto a2 = [&](double x) {
    return -cplx(0, 1) * (delta0 + p.beta2 * x) + p.kappa2 / 2.0 + p.gain.eta2;
  };
  double x1 = I1, x2 = I2;
  for (int it = 0; it < 1000; ++it) {
    const cplx det = a1(x1) * std::conj(a2(x2)) + C;
    const double nd = std::norm(det);
    if (nd == 0.0) break;
    const double e2 = epsilon * epsilon;
    const double n1 = e2 * std::norm(std::conj(a2(x2)) + mu * p.gain.xi12) / nd;
    const double n2 = e2 * std::norm(mu * std::conj(a1(x1)) - p.gain.xi21) / nd;
    const double u1 = 0.5 * x1 + 0.5 * n1, u2 = 0.5 * x2 + 0.5 * n2;
    const bool done = std::abs(u1 - x1) <= 1e-10 * std::max(u1, 1e-300) &&
                      std::abs(u2 - x2) <= 1e-10 * std::max(u2, 1e-300);
    x1 = u1;
    x2 = u2;
    if (done) break;
  }
  const auto res = brwa_mean_fields(p, delta0, epsilon, mu, {{x1, x2}});
  if (res.branches.empty())
    throw DynamicsError("beyond-RWA mean fields did not converge");
  // keep the branch the seed landed on
  const SteadyStateBranch* best = &res.branches.front();
  for (const auto& b : res.branches)
    if (std::abs(b.I1 - x1) < std::abs(best->I1 - x1)) best = &b;
  return *best;
}

DynamicsRun run_dynamics(const SystemConfig& cfg, const DynamicsOptions& opt) {
  DynamicsRun run;
  run.der = derive_params(cfg);
  run.gain = compute_xi(cfg.atomic);
  const SteadyStateParams sp = steady_params(cfg, run.der);

  const double delta0 = cfg.cavity[0].delta0;
  const double eps1 = run.der.epsilon[0];
  run.mu = opt.mu >= 0 ? opt.mu : (eps1 > 0 ? run.der.epsilon[1] / eps1 : 0.0);

  run.steady = brwa_mean_fields(sp, delta0, eps1, run.mu);
  if (run.steady.branches.empty())
    throw DynamicsError("no steady-state branch found for the dynamics");
  run.branch_index = 0;
  if (opt.branch >= 0) {
    if (opt.branch >= static_cast<int>(run.steady.branches.size()))
      throw DynamicsError("requested branch does not exist");
    run.branch_index = opt.branch;
  } else {
    for (size_t i = 0; i < run.steady.branches.size(); ++i)
      if (run.steady.branches[i].stable == Stability::stable) {
        run.branch_index = static_cast<int>(i);
        break;
      }
  }
  const SteadyStateBranch& branch = run.steady.branches[run.branch_index];
  run.coupling = mirror_coupling(run.gain, branch, cfg, run.der);

  const double t_end = opt.t_end > 0 ? opt.t_end : 10.0 / cfg.mirror[0].gamma_m;
  double dt = opt.dt > 0 ? opt.dt
                         : default_time_step(run.coupling, cfg.cavity[0].kappa,
                                             cfg.cavity[1].kappa);
  PropagateOptions popt;
  popt.halving_tol = opt.halving_tol;
  const long nsteps = std::lround(std::ceil(t_end / dt));
  popt.sample_stride =
      std::max(1L, nsteps / std::max(opt.max_samples - 1, 1));
  const MirrorCoupling& c = run.coupling;
  run.traj = propagate([&c](double t) { return drift_matrix(c, t); },
                       [&c](double t) { return noise_matrix(c, t); },
                       thermal_initial_state(c.n1, c.n2), t_end, dt, popt);
  return run;
}

namespace {

struct SweepPoint {
  std::vector<double> values;  // one per axis
  std::string rows;            // preformatted CSV rows
  std::string error;
};

std::string stability_str(Stability s) { return to_string(s); }

}  // namespace

SweepResult run_sweep(const nlohmann::json& doc, int jobs) {
  if (!doc.contains("subcommand") || !doc.contains("config"))
    throw ConfigError("sweep manifest needs 'subcommand' and 'config'");
  const std::string sub = doc.at("subcommand").get<std::string>();
  if (sub != "gain" && sub != "bistability" && sub != "entanglement")
    throw ConfigError("sweep supports subcommands gain, bistability, entanglement");

  RunManifest manifest;
  manifest.subcommand = "sweep:" + sub;
  manifest.flags = doc.contains("flags") ? doc.at("flags") : nlohmann::json::object();
  manifest.axes = doc.contains("axes") ? doc.at("axes") : nlohmann::json::array();
  manifest.seed = doc.contains("seed") ? doc.at("seed").get<std::uint64_t>() : 0;
  const nlohmann::json base_cfg = doc.at("config");
  manifest.config = config_to_json(parse_config(base_cfg));  // validates early

  struct Axis {
    std::string path, unit;
    std::vector<double> values;
  };
  std::vector<Axis> axes;
  for (const auto& a : manifest.axes) {
    Axis ax;
    ax.path = a.at("path").get<std::string>();
    ax.unit = a.contains("unit") ? a.at("unit").get<std::string>() : "1";
    for (const auto& v : a.at("values")) ax.values.push_back(v.get<double>());
    if (ax.values.empty()) throw ConfigError("sweep axis '" + ax.path + "' is empty");
    axes.push_back(std::move(ax));
  }

  size_t n_points = 1;
  for (const auto& ax : axes) n_points *= ax.values.size();

  auto point_config = [&](size_t idx) {
    nlohmann::json cfg = base_cfg;
    size_t rem = idx;
    std::vector<double> vals(axes.size());
    for (size_t a = axes.size(); a-- > 0;) {
      const size_t k = rem % axes[a].values.size();
      rem /= axes[a].values.size();
      vals[a] = axes[a].values[k];
      const auto dot = axes[a].path.find('.');
      if (dot == std::string::npos)
        throw ConfigError("axis path must be 'section.field'");
      cfg[axes[a].path.substr(0, dot)][axes[a].path.substr(dot + 1)] =
          nlohmann::json{{"value", vals[a]}, {"unit", axes[a].unit}};
    }
    return std::make_pair(cfg, vals);
  };

  const nlohmann::json& flags = manifest.flags;
  const double mu = flags.contains("mu") ? flags.at("mu").get<double>() : -1.0;
  const std::string model_s =
      flags.contains("model") ? flags.at("model").get<std::string>() : "brwa";

  auto run_point = [&](size_t idx, SweepPoint& out) {
    auto [cfg_json, vals] = point_config(idx);
    out.values = vals;
    std::ostringstream rows;
    auto prefix = [&] {
      std::string p = std::to_string(idx);
      for (double v : vals) p += "," + format_sci(v);
      return p;
    };
    try {
      const SystemConfig cfg = parse_config(cfg_json);
      if (sub == "gain") {
        const GainCoefficients gc = compute_xi(cfg.atomic);
        const auto er = effective_rates(gc, cfg.cavity[0].kappa, cfg.cavity[1].kappa);
        rows << prefix();
        for (const cplx& x : gc.xi)
          rows << "," << format_sci(x.real()) << "," << format_sci(x.imag());
        for (const cplx& x : {gc.xi11, gc.xi12, gc.xi21, gc.xi22, er.kappa_p1,
                              er.kappa_p2, er.kappa_combined})
          rows << "," << format_sci(x.real()) << "," << format_sci(x.imag());
        rows << "\n";
      } else if (sub == "bistability") {
        const DerivedParams der = derive_params(cfg);
        const SteadyStateParams sp = steady_params(cfg, der);
        const double d0 = cfg.cavity[0].delta0;
        const double eps = der.epsilon[0];
        const double mu_eff =
            mu >= 0 ? mu : (eps > 0 ? der.epsilon[1] / eps : 0.0);
        SolveResult r;
        if (model_s == "rwa") {
          const auto r1 = rwa_branches(sp, 1, d0, eps);
          const auto r2 = rwa_branches(sp, 2, -d0, mu_eff * eps);
          for (const auto& b1 : r1.branches)
            for (const auto& b2 : r2.branches) {
              SteadyStateBranch b = b1;
              b.I2 = b2.I2;
              b.a2_mean = b2.a2_mean;
              b.mirror_shift2 = b2.mirror_shift2;
              b.residual2 = b2.residual2;
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
        for (const auto& b : r.branches)
          rows << prefix() << "," << b.branch_id << "," << format_sci(b.I1)
               << "," << format_sci(b.I2) << "," << stability_str(b.stable)
               << "\n";
      } else {  // entanglement summary
        DynamicsOptions dopt;
        if (flags.contains("t_end"))
          dopt.t_end = parse_quantity(flags.at("t_end"), Dimension::time, "t_end");
        if (flags.contains("dt"))
          dopt.dt = parse_quantity(flags.at("dt"), Dimension::time, "dt");
        dopt.mu = mu;
        const DynamicsRun dr = run_dynamics(cfg, dopt);
        const EntanglementSeries es = entanglement_series(dr.traj);
        const double en_max =
            es.E_N.empty() ? 0.0 : *std::max_element(es.E_N.begin(), es.E_N.end());
        rows << prefix() << ","
             << (es.death_time ? format_sci(*es.death_time) : "nan") << ","
             << format_sci(en_max) << "," << format_sci(es.E_N.back()) << "\n";
      }
      out.rows = rows.str();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  std::vector<SweepPoint> points(n_points);
  const int nw = std::max(1, std::min<int>(jobs, static_cast<int>(n_points)));
  if (nw <= 1) {
    for (size_t i = 0; i < n_points; ++i) run_point(i, points[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < n_points; i = next.fetch_add(1))
          run_point(i, points[i]);
      });
    for (auto& th : pool) th.join();
  }

  std::string header = "point";
  for (const auto& ax : axes) header += "," + ax.path;
  if (sub == "gain") {
    for (int i = 1; i <= 8; ++i)
      header += ",xi" + std::to_string(i) + "_re,xi" + std::to_string(i) + "_im";
    for (const char* n : {"xi11", "xi12", "xi21", "xi22", "kappa_p1", "kappa_p2",
                          "kappa_combined"})
      header += std::string(",") + n + "_re," + n + "_im";
  } else if (sub == "bistability") {
    header += ",branch_id,I1,I2,stable";
  } else {
    header += ",death_time,E_N_max,E_N_final";
  }

  SweepResult result;
  result.n_points = static_cast<int>(n_points);
  std::vector<std::string> rows;
  nlohmann::json errors = nlohmann::json::array();
  for (size_t i = 0; i < n_points; ++i) {
    if (!points[i].error.empty()) {
      ++result.n_failed;
      errors.push_back({{"point", i}, {"error", points[i].error}});
      continue;
    }
    std::istringstream iss(points[i].rows);
    std::string line;
    while (std::getline(iss, line)) rows.push_back(line);
  }
  result.outputs.add_csv("sweep.csv", manifest, header, rows);
  nlohmann::json summary{{"n_points", result.n_points},
                         {"n_failed", result.n_failed},
                         {"errors", errors}};
  result.outputs.add_json("sweep_manifest.json", manifest, summary);
  return result;
}

}  // namespace ramanopt
