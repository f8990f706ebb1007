#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

namespace ramanopt {

// All rates in rad/s after ingest.
struct AtomicConfig {
  double g1 = 0, g2 = 0;          // atom-field couplings
  double Omega = 0, Omega_p = 0;  // classical drive Rabi amplitudes
  double gamma_a = 0, gamma_b = 0, gamma_c = 0, gamma_d = 0;
  double gamma_ab = 0, gamma_ac = 0, gamma_ad = 0;
  double gamma_bc = 0, gamma_bd = 0, gamma_cd = 0;
  double Delta_1 = 0, Delta_2 = 0, Delta_c = 0;
  double r_a = 0;   // atom injection rate (1/s)
  double eta = 0;   // initial-superposition parameter, [-1, 1]

  void validate() const;
};

struct CavityModeConfig {
  double nu = 0;       // cavity mode frequency (rad/s)
  double length = 0;   // m
  double kappa = 0;    // cavity decay (rad/s)
  double P = 0;        // pump power (W)
  double omega_L = 0;  // pump frequency (rad/s)
  double delta0 = 0;   // nu - omega_L (rad/s)
  double N = 0;        // thermal photon number

  void validate() const;
};

struct MirrorConfig {
  double mass = 0;     // kg
  double omega_m = 0;  // rad/s
  double gamma_m = 0;  // rad/s
  double n = 0;        // thermal phonon occupation (resolved from T if given)
  std::optional<double> T;  // K, when the bath was specified by temperature

  void validate() const;
};

struct SystemConfig {
  AtomicConfig atomic;
  std::array<CavityModeConfig, 2> cavity;
  std::array<MirrorConfig, 2> mirror;

  void validate() const;
};

struct DerivedParams {
  std::array<double, 2> G;       // optomechanical coupling (rad/s)
  std::array<double, 2> epsilon; // drive amplitude magnitude (rad/s)
  std::array<double, 2> beta;    // radiation-pressure response (rad/s per photon)
  std::array<double, 2> n;       // thermal phonon occupation
  std::array<double, 2> delta0;  // bare cavity-laser detuning (rad/s)
};

// Thermal Bose occupation at temperature T (K) and frequency omega (rad/s).
double thermal_occupation(double omega, double T);

DerivedParams derive_params(const SystemConfig& cfg);

SystemConfig parse_config(const nlohmann::json& j);
SystemConfig load_config(const std::string& path);

// Round-trippable snapshot of a config in SI units (rad/s, W, m, kg).
nlohmann::json config_to_json(const SystemConfig& cfg);

}  // namespace ramanopt
