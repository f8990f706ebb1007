#include "ramanopt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ramanopt/constants.hpp"
#include "ramanopt/units.hpp"

namespace ramanopt {

namespace {

void require_nonneg(double v, const char* name) {
  if (!(v >= 0)) throw ConfigError(std::string(name) + " must be >= 0");
}

double get_rate(const nlohmann::json& j, const std::string& key) {
  return parse_quantity(j.at(key), Dimension::rate, key);
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

}  // namespace

void AtomicConfig::validate() const {
  for (auto [v, name] : std::initializer_list<std::pair<double, const char*>>{
           {g1, "g1"}, {g2, "g2"}, {Omega, "Omega"}, {Omega_p, "Omega_p"},
           {gamma_a, "gamma_a"}, {gamma_b, "gamma_b"}, {gamma_c, "gamma_c"},
           {gamma_d, "gamma_d"}, {gamma_ab, "gamma_ab"}, {gamma_ac, "gamma_ac"},
           {gamma_ad, "gamma_ad"}, {gamma_bc, "gamma_bc"}, {gamma_bd, "gamma_bd"},
           {gamma_cd, "gamma_cd"}, {r_a, "r_a"}})
    require_nonneg(v, name);
  if (!(eta >= -1.0 && eta <= 1.0))
    throw ConfigError("eta must lie in [-1, 1]");
}

void CavityModeConfig::validate() const {
  if (!(kappa > 0)) throw ConfigError("kappa must be > 0");
  if (!(length > 0)) throw ConfigError("cavity length must be > 0");
  if (!(nu > 0)) throw ConfigError("cavity frequency must be > 0");
  require_nonneg(P, "P");
  require_nonneg(N, "N");
  if (!(omega_L > 0)) throw ConfigError("pump frequency must be > 0");
}

void MirrorConfig::validate() const {
  if (!(mass > 0)) throw ConfigError("mirror mass must be > 0");
  if (!(omega_m > 0)) throw ConfigError("omega_m must be > 0");
  require_nonneg(gamma_m, "gamma_m");
  require_nonneg(n, "n (thermal occupation)");
  if (T && *T < 0) throw ConfigError("T must be >= 0");
}

void SystemConfig::validate() const {
  atomic.validate();
  for (const auto& c : cavity) c.validate();
  for (const auto& m : mirror) m.validate();
}

double thermal_occupation(double omega, double T) {
  if (T < 0) throw ConfigError("T must be >= 0");
  if (T == 0) return 0.0;
  const double x = hbar * omega / (k_boltzmann * T);
  return 1.0 / std::expm1(x);
}

DerivedParams derive_params(const SystemConfig& cfg) {
  cfg.validate();
  DerivedParams d{};
  for (int j = 0; j < 2; ++j) {
    const auto& cav = cfg.cavity[j];
    const auto& mir = cfg.mirror[j];
    d.G[j] = cav.nu / cav.length * std::sqrt(hbar / (mir.mass * mir.omega_m));
    d.epsilon[j] = std::sqrt(cav.kappa * cav.P / (hbar * cav.omega_L));
    d.beta[j] = 2.0 * mir.omega_m * d.G[j] * d.G[j] /
                (mir.gamma_m * mir.gamma_m / 4.0 + mir.omega_m * mir.omega_m);
    d.n[j] = mir.T ? thermal_occupation(mir.omega_m, *mir.T) : mir.n;
    d.delta0[j] = cav.delta0;
  }
  return d;
}

namespace {

AtomicConfig parse_atomic(const nlohmann::json& j) {
  check_keys(j, {"g1", "g2", "Omega", "Omega_p", "gamma",
                 "gamma_a", "gamma_b", "gamma_c", "gamma_d",
                 "gamma_ab", "gamma_ac", "gamma_ad", "gamma_bc", "gamma_bd",
                 "gamma_cd", "Delta_1", "Delta_2", "Delta_c", "r_a", "eta"},
             "atomic");
  AtomicConfig a{};
  a.g1 = get_rate(j, "g1");
  a.g2 = get_rate(j, "g2");
  a.Omega = get_rate(j, "Omega");
  a.Omega_p = get_rate(j, "Omega_p");
  if (j.contains("gamma")) {
    // symmetric default: one scalar populates all decay/dephasing rates
    const double g = get_rate(j, "gamma");
    a.gamma_a = a.gamma_b = a.gamma_c = a.gamma_d = g;
    a.gamma_ab = a.gamma_ac = a.gamma_ad = g;
    a.gamma_bc = a.gamma_bd = a.gamma_cd = g;
  }
  auto rate_opt = [&](const char* key, double& target) {
    if (j.contains(key)) target = get_rate(j, key);
  };
  rate_opt("gamma_a", a.gamma_a);
  rate_opt("gamma_b", a.gamma_b);
  rate_opt("gamma_c", a.gamma_c);
  rate_opt("gamma_d", a.gamma_d);
  rate_opt("gamma_ab", a.gamma_ab);
  rate_opt("gamma_ac", a.gamma_ac);
  rate_opt("gamma_ad", a.gamma_ad);
  rate_opt("gamma_bc", a.gamma_bc);
  rate_opt("gamma_bd", a.gamma_bd);
  rate_opt("gamma_cd", a.gamma_cd);
  if (!j.contains("gamma")) {
    for (const char* key : {"gamma_a", "gamma_b", "gamma_c", "gamma_d",
                            "gamma_ab", "gamma_ac", "gamma_ad", "gamma_bc",
                            "gamma_bd", "gamma_cd"})
      if (!j.contains(key))
        throw ConfigError(std::string("atomic: missing '") + key +
                          "' (or provide the scalar 'gamma')");
  }
  // detunings may be negative; parse without sign restriction
  a.Delta_1 = j.contains("Delta_1") ? get_rate(j, "Delta_1") : 0.0;
  a.Delta_2 = j.contains("Delta_2") ? get_rate(j, "Delta_2") : 0.0;
  a.Delta_c = j.contains("Delta_c") ? get_rate(j, "Delta_c") : 0.0;
  a.r_a = get_rate(j, "r_a");
  a.eta = parse_quantity(j.at("eta"), Dimension::dimensionless, "eta");
  return a;
}

CavityModeConfig parse_cavity(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"wavelength", "frequency", "length", "kappa", "P",
                 "omega_L", "delta0", "N"},
             where);
  CavityModeConfig c{};
  if (j.contains("wavelength") == j.contains("frequency"))
    throw ConfigError(where + ": give exactly one of 'wavelength' or 'frequency'");
  if (j.contains("wavelength")) {
    const double lam = parse_quantity(j.at("wavelength"), Dimension::length, "wavelength");
    if (!(lam > 0)) throw ConfigError(where + ": wavelength must be > 0");
    c.nu = two_pi * c_light / lam;
  } else {
    c.nu = get_rate(j, "frequency");
  }
  c.length = parse_quantity(j.at("length"), Dimension::length, "length");
  c.kappa = get_rate(j, "kappa");
  c.P = parse_quantity(j.at("P"), Dimension::power, "P");
  if (j.contains("omega_L") == j.contains("delta0"))
    throw ConfigError(where + ": give exactly one of 'omega_L' or 'delta0'");
  // delta0 is canonical; omega_L is always nu - delta0 so that serialized
  // configs reparse to bit-identical derived parameters
  if (j.contains("omega_L"))
    c.delta0 = c.nu - get_rate(j, "omega_L");
  else
    c.delta0 = get_rate(j, "delta0");
  c.omega_L = c.nu - c.delta0;
  c.N = j.contains("N") ? parse_quantity(j.at("N"), Dimension::dimensionless, "N") : 0.0;
  return c;
}

MirrorConfig parse_mirror(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"mass", "omega_m", "gamma_m", "T", "n"}, where);
  MirrorConfig m{};
  m.mass = parse_quantity(j.at("mass"), Dimension::mass, "mass");
  m.omega_m = get_rate(j, "omega_m");
  m.gamma_m = get_rate(j, "gamma_m");
  if (j.contains("T") == j.contains("n"))
    throw ConfigError(where + ": give exactly one of 'T' or 'n'");
  if (j.contains("T")) {
    m.T = parse_quantity(j.at("T"), Dimension::temperature, "T");
    if (*m.T < 0) throw ConfigError(where + ": T must be >= 0");
    m.n = thermal_occupation(m.omega_m, *m.T);
  } else {
    m.n = parse_quantity(j.at("n"), Dimension::dimensionless, "n");
  }
  return m;
}

}  // namespace

SystemConfig parse_config(const nlohmann::json& j) {
  check_keys(j, {"atomic", "cavity1", "cavity2", "mirror1", "mirror2"}, "config");
  for (const char* key : {"atomic", "cavity1", "cavity2", "mirror1", "mirror2"})
    if (!j.contains(key))
      throw ConfigError(std::string("config: missing section '") + key + "'");
  SystemConfig cfg;
  cfg.atomic = parse_atomic(j.at("atomic"));
  cfg.cavity[0] = parse_cavity(j.at("cavity1"), "cavity1");
  cfg.cavity[1] = parse_cavity(j.at("cavity2"), "cavity2");
  cfg.mirror[0] = parse_mirror(j.at("mirror1"), "mirror1");
  cfg.mirror[1] = parse_mirror(j.at("mirror2"), "mirror2");
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const SystemConfig& cfg) {
  auto q = [](double v, const char* unit) {
    return nlohmann::json{{"value", v}, {"unit", unit}};
  };
  const auto& a = cfg.atomic;
  nlohmann::json ja{
      {"g1", q(a.g1, "rad/s")}, {"g2", q(a.g2, "rad/s")},
      {"Omega", q(a.Omega, "rad/s")}, {"Omega_p", q(a.Omega_p, "rad/s")},
      {"gamma_a", q(a.gamma_a, "rad/s")}, {"gamma_b", q(a.gamma_b, "rad/s")},
      {"gamma_c", q(a.gamma_c, "rad/s")}, {"gamma_d", q(a.gamma_d, "rad/s")},
      {"gamma_ab", q(a.gamma_ab, "rad/s")}, {"gamma_ac", q(a.gamma_ac, "rad/s")},
      {"gamma_ad", q(a.gamma_ad, "rad/s")}, {"gamma_bc", q(a.gamma_bc, "rad/s")},
      {"gamma_bd", q(a.gamma_bd, "rad/s")}, {"gamma_cd", q(a.gamma_cd, "rad/s")},
      {"Delta_1", q(a.Delta_1, "rad/s")}, {"Delta_2", q(a.Delta_2, "rad/s")},
      {"Delta_c", q(a.Delta_c, "rad/s")},
      {"r_a", q(a.r_a, "Hz")}, {"eta", q(a.eta, "1")}};
  nlohmann::json out{{"atomic", ja}};
  for (int j = 0; j < 2; ++j) {
    const auto& c = cfg.cavity[j];
    out[j == 0 ? "cavity1" : "cavity2"] = {
        {"frequency", q(c.nu, "rad/s")}, {"length", q(c.length, "m")},
        {"kappa", q(c.kappa, "rad/s")}, {"P", q(c.P, "W")},
        {"delta0", q(c.delta0, "rad/s")}, {"N", q(c.N, "1")}};
    const auto& m = cfg.mirror[j];
    out[j == 0 ? "mirror1" : "mirror2"] = {
        {"mass", q(m.mass, "kg")}, {"omega_m", q(m.omega_m, "rad/s")},
        {"gamma_m", q(m.gamma_m, "rad/s")}, {"n", q(m.n, "1")}};
  }
  return out;
}

}  // namespace ramanopt
