#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ramanopt/config.hpp"
#include "ramanopt/gain.hpp"

namespace ramanopt {

enum class Stability { stable, unstable, unknown };

const char* to_string(Stability s);

struct SteadyStateBranch {
  double I1 = 0, I2 = 0;             // mean photon numbers
  cplx a1_mean{0, 0}, a2_mean{0, 0};
  double mirror_shift1 = 0, mirror_shift2 = 0;  // <b_j^dag + b_j>
  int branch_id = 0;
  Stability stable = Stability::unknown;
  double residual1 = 0, residual2 = 0;  // relative residual of the defining eqs
};

// Inputs of one steady-state solve that do not depend on the swept drive.
struct SteadyStateParams {
  GainCoefficients gain;
  double kappa1 = 0, kappa2 = 0;
  double beta1 = 0, beta2 = 0;
  double G1 = 0, G2 = 0;
};

SteadyStateParams steady_params(const SystemConfig& cfg);
SteadyStateParams steady_params(const SystemConfig& cfg, const DerivedParams& der);

struct SolveResult {
  std::vector<SteadyStateBranch> branches;
  std::vector<std::string> diagnostics;
};

// All real roots of c3 I^3 + c2 I^2 + c1 I + c0 = 0, ascending.
std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0);

// Rotating-wave S-curve of a single mode: roots of
//   I |i(delta0 - beta I) + kappa/2 + (-1)^j eta_j|^2 = |eps|^2.
// mode_index is 1 or 2.
SolveResult rwa_branches(const SteadyStateParams& p, int mode_index,
                         double delta0, double epsilon);

// Coupled intensities beyond the RWA at delta02 = -delta01 = -delta0,
// with |eps2| = mu |eps1|.
SolveResult brwa_mean_fields(const SteadyStateParams& p, double delta0,
                             double epsilon, double mu,
                             std::optional<std::pair<double, double>> seed_guess = {});

// Positional stability flags for a branch list sorted by intensity.
void classify_stability(std::vector<SteadyStateBranch>& branches);

enum class SteadyModel { rwa, brwa };

struct PhaseDiagram {
  std::vector<double> delta0_grid;  // rad/s
  std::vector<double> P_grid;       // W
  struct Cell {
    int count = 0;        // distinct I1 values (the plotted observable)
    int count_joint = 0;  // raw (I1, I2) solution count
    double I_min = 0, I_max = 0;
  };
  std::vector<Cell> cells;  // row-major: [i_delta0 * nP + i_P]
  std::vector<std::string> diagnostics;
};

// P is converted to the drive amplitude through cavity 1 of cfg
// (eps = sqrt(kappa P / (hbar omega_L))); mode-2 drive follows mu.
PhaseDiagram phase_diagram(const SystemConfig& cfg,
                           const std::vector<double>& delta0_grid,
                           const std::vector<double>& P_grid,
                           SteadyModel model, double mu, int jobs = 1);

}  // namespace ramanopt
