#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ramanopt/runner.hpp"
#include "ramanopt/units.hpp"

using namespace ramanopt;

namespace {

nlohmann::json sweep_config() {
  auto q = [](double v, const char* u) {
    return nlohmann::json{{"value", v}, {"unit", u}};
  };
  nlohmann::json atomic{
      {"g1", q(2, "2pi MHz")}, {"g2", q(2, "2pi MHz")},
      {"Omega", q(17, "MHz")}, {"Omega_p", q(3, "MHz")},
      {"gamma", q(3.4, "MHz")},
      {"r_a", q(1.6, "MHz")}, {"eta", q(0.4, "1")}};
  nlohmann::json cav1{{"wavelength", q(810, "nm")}, {"length", q(112, "um")},
                      {"kappa", q(215, "2pi kHz")}, {"P", q(1, "nW")},
                      {"delta0", q(1, "2pi MHz")}, {"N", q(0, "1")}};
  nlohmann::json cav2{{"wavelength", q(1024, "nm")}, {"length", q(88.6, "um")},
                      {"kappa", q(215, "2pi kHz")}, {"P", q(1, "nW")},
                      {"delta0", q(-1, "2pi MHz")}, {"N", q(0, "1")}};
  nlohmann::json mir{{"mass", q(145, "ng")}, {"omega_m", q(3, "2pi MHz")},
                     {"gamma_m", q(60, "2pi MHz")}, {"n", q(1, "1")}};
  return nlohmann::json{{"atomic", atomic}, {"cavity1", cav1},
                        {"cavity2", cav2}, {"mirror1", mir}, {"mirror2", mir}};
}

int count_rows(const std::string& csv) {
  std::istringstream iss(csv);
  std::string line;
  int n = 0;
  while (std::getline(iss, line))
    if (!line.empty() && line[0] != '#' && line.find("point") != 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("format_sci uses 12 significant digits") {
  CHECK(format_sci(1.0) == "1.00000000000e+00");
  CHECK(format_sci(-2.5e-7) == "-2.50000000000e-07");
}

TEST_CASE("fnv1a64 is stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == fnv1a64("a"));
  CHECK(fnv1a64("a") != fnv1a64("b"));
}

TEST_CASE("manifest hash embedded in every output") {
  RunManifest m;
  m.subcommand = "test";
  m.config = {{"k", 1}};
  m.flags = {{"f", true}};
  OutputSet out;
  out.add_csv("a.csv", m, "x,y", {"1,2"});
  out.add_json("b.json", m, {{"v", 3}});
  CHECK(out.files.at("a.csv").find("# manifest=" + m.hash_hex()) == 0);
  const auto j = nlohmann::json::parse(out.files.at("b.json"));
  CHECK(j.at("manifest_hash") == m.hash_hex());
  CHECK(j.at("manifest").at("subcommand") == "test");
}

TEST_CASE("output set writes and verifies") {
  RunManifest m;
  m.subcommand = "t";
  OutputSet out;
  out.add_csv("f.csv", m, "a", {"1", "2"});
  const std::string dir = "test_runner_out";
  std::filesystem::remove_all(dir);
  out.write(dir);
  CHECK(out.verify_against(dir).empty());
  {
    std::ofstream f(dir + "/f.csv", std::ios::app);
    f << "tampered\n";
  }
  const auto bad = out.verify_against(dir);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0] == "f.csv");
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep shapes and determinism") {
  nlohmann::json doc{{"subcommand", "gain"}, {"config", sweep_config()}};
  SUBCASE("empty axes is a single run") {
    const auto r = run_sweep(doc, 1);
    CHECK(r.n_points == 1);
    CHECK(r.n_failed == 0);
    CHECK(count_rows(r.outputs.files.at("sweep.csv")) == 1);
  }
  SUBCASE("2x2 grid in row-major order") {
    doc["axes"] = nlohmann::json::array(
        {{{"path", "atomic.Omega"}, {"unit", "MHz"}, {"values", {10.0, 20.0}}},
         {{"path", "atomic.eta"}, {"unit", "1"}, {"values", {-0.5, 0.5}}}});
    const auto r = run_sweep(doc, 1);
    CHECK(r.n_points == 4);
    const std::string& csv = r.outputs.files.at("sweep.csv");
    CHECK(count_rows(csv) == 4);
    // row-major: Omega slow axis, eta fast axis
    std::istringstream iss(csv);
    std::string line;
    std::getline(iss, line);  // hash
    std::getline(iss, line);  // header
    CHECK(line.find("point,atomic.Omega,atomic.eta,xi1_re") == 0);
    std::vector<std::pair<double, double>> order;
    while (std::getline(iss, line)) {
      std::istringstream ls(line);
      std::string tok;
      std::getline(ls, tok, ',');
      std::getline(ls, tok, ',');
      const double om = std::stod(tok);
      std::getline(ls, tok, ',');
      order.emplace_back(om, std::stod(tok));
    }
    REQUIRE(order.size() == 4);
    // axis columns stay in the axis unit (MHz) declared by the manifest
    CHECK(order[0] == std::pair{10.0, -0.5});
    CHECK(order[1] == std::pair{10.0, 0.5});
    CHECK(order[2] == std::pair{20.0, -0.5});
    CHECK(order[3] == std::pair{20.0, 0.5});
  }
  SUBCASE("rerun is byte identical, independent of jobs") {
    doc["axes"] = nlohmann::json::array(
        {{{"path", "cavity1.P"}, {"unit", "nW"}, {"values", {0.5, 1.0, 2.0}}},
         {{"path", "atomic.Omega"}, {"unit", "MHz"}, {"values", {5.0, 15.0}}}});
    doc["subcommand"] = "bistability";
    doc["flags"] = {{"model", "brwa"}, {"mu", 1.0}};
    const auto r1 = run_sweep(doc, 1);
    const auto r2 = run_sweep(doc, 4);
    CHECK(r1.outputs.files.at("sweep.csv") == r2.outputs.files.at("sweep.csv"));
    CHECK(r1.outputs.files.at("sweep_manifest.json") ==
          r2.outputs.files.at("sweep_manifest.json"));
  }
  SUBCASE("per-point failures are collected, not fatal") {
    doc["axes"] = nlohmann::json::array(
        {{{"path", "atomic.eta"}, {"unit", "1"}, {"values", {0.0, 7.0}}}});
    const auto r = run_sweep(doc, 1);
    CHECK(r.n_points == 2);
    CHECK(r.n_failed == 1);
    CHECK(count_rows(r.outputs.files.at("sweep.csv")) == 1);
    const auto j = nlohmann::json::parse(r.outputs.files.at("sweep_manifest.json"));
    CHECK(j.at("n_failed") == 1);
    REQUIRE(j.at("errors").size() == 1);
    CHECK(j.at("errors")[0].at("point") == 1);
  }
}

TEST_CASE("preset configs exist and run_dynamics works end to end") {
  for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"})
    CHECK_NOTHROW(preset_base_config(name));
  CHECK_THROWS_AS(preset_base_config("fig9"), ConfigError);

  const SystemConfig cfg = preset_base_config("fig6");
  DynamicsOptions opt;
  opt.max_samples = 50;
  const DynamicsRun run = run_dynamics(cfg, opt);
  CHECK(run.traj.times.size() >= 2);
  CHECK(run.traj.times.back() > 0);
  CHECK(run.steady.branches.size() >= 1);
  // nW drive, far-detuned: photon numbers are small
  CHECK(run.steady.branches[run.branch_index].I1 < 10.0);
  CHECK(run.mu == doctest::Approx(run.der.epsilon[1] / run.der.epsilon[0]));
}

TEST_CASE("brwa_from_rwa_seed matches the multi-start solver") {
  const SystemConfig cfg = preset_base_config("fig4");
  const DerivedParams der = derive_params(cfg);
  const SteadyStateParams sp = steady_params(cfg, der);
  const double eps = der.epsilon[0];
  const double mu = der.epsilon[1] / eps;
  const SteadyStateBranch b =
      brwa_from_rwa_seed(sp, cfg.cavity[0].delta0, eps, mu);
  const auto all = brwa_mean_fields(sp, cfg.cavity[0].delta0, eps, mu);
  REQUIRE(!all.branches.empty());
  CHECK(b.I1 == doctest::Approx(all.branches.front().I1).epsilon(1e-8));
  CHECK(b.residual1 <= 1e-10);
  CHECK(b.residual2 <= 1e-10);
}
