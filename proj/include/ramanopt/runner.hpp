#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ramanopt/config.hpp"
#include "ramanopt/dynamics.hpp"
#include "ramanopt/entanglement.hpp"
#include "ramanopt/steady_state.hpp"

namespace ramanopt {

inline constexpr const char* artifact_version = "ramanopt 0.1.0";

// exit codes of the CLI
inline constexpr int exit_ok = 0;
inline constexpr int exit_partial = 2;
inline constexpr int exit_config_error = 3;

std::uint64_t fnv1a64(std::string_view s);
std::string format_sci(double v);  // 12 significant digits, scientific

// Everything that determines a run's outputs byte-for-byte.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;  // SI snapshot
  nlohmann::json flags;
  nlohmann::json axes = nlohmann::json::array();
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  std::string hash_hex() const;
};

// In-memory output files; written (or byte-compared in verify mode) at the end.
struct OutputSet {
  std::map<std::string, std::string> files;  // name -> bytes
  void add_csv(const std::string& name, const RunManifest& m,
               const std::string& header, const std::vector<std::string>& rows);
  void add_json(const std::string& name, const RunManifest& m, nlohmann::json body);
  // returns names whose on-disk bytes differ (verify) or writes files (write)
  std::vector<std::string> verify_against(const std::string& dir) const;
  void write(const std::string& dir) const;
};

// One end-to-end dynamics solve (config -> gain -> mean fields -> coupling
// -> covariance trajectory).
struct DynamicsRun {
  DerivedParams der;
  GainCoefficients gain;
  SolveResult steady;
  int branch_index = 0;
  MirrorCoupling coupling;
  CovarianceTrajectory traj;
  double mu = 0;
};

struct DynamicsOptions {
  double t_end = 0;        // 0: 10 / gamma_m1
  double dt = 0;           // 0: default_time_step
  double mu = -1;          // < 0: from config drive amplitudes
  int branch = -1;         // < 0: lowest stable branch
  int max_samples = 600;
  double halving_tol = 0;
};

DynamicsRun run_dynamics(const SystemConfig& cfg, const DynamicsOptions& opt);

// Beyond-RWA mean field seeded from the RWA solution (self-consistent
// iteration of the coupled expectation values; the dynamics entry point).
SteadyStateBranch brwa_from_rwa_seed(const SteadyStateParams& p, double delta0,
                                     double epsilon, double mu);

// Figure-reproduction presets: fig2..fig7. Returns the produced files.
OutputSet run_preset(const std::string& name, int jobs);
SystemConfig preset_base_config(const std::string& name);

// Cartesian parameter sweep described by a manifest document.
struct SweepResult {
  OutputSet outputs;
  int n_points = 0;
  int n_failed = 0;
};
SweepResult run_sweep(const nlohmann::json& manifest_doc, int jobs);

}  // namespace ramanopt
