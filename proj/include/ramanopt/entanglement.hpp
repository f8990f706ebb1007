#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ramanopt/dynamics.hpp"

namespace ramanopt {

class EntanglementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogNegativityResult {
  double E_N = 0;        // nats
  double eta_minus = 0;  // smallest partial-transpose symplectic eigenvalue
  bool bona_fide = true; // uncertainty-principle check (warn-only)
};

// Logarithmic negativity of a two-mode Gaussian state with covariance V
// (vacuum variance 1/2 convention).
LogNegativityResult log_negativity(const Eigen::Matrix4d& V);

struct EntanglementSeries {
  std::vector<double> times;
  std::vector<double> E_N;
  std::vector<double> eta_minus;
  std::optional<double> death_time;  // first zero that persists to the horizon
  std::vector<std::pair<double, double>> revivals;  // later E_N > 0 intervals
};

EntanglementSeries entanglement_series(const CovarianceTrajectory& traj);

}  // namespace ramanopt
