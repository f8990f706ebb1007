#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ramanopt/config.hpp"
#include "ramanopt/gain.hpp"
#include "ramanopt/steady_state.hpp"

namespace ramanopt {

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective mirror-mirror dynamics after adiabatic elimination of the
// cavity fields, evaluated at one steady-state operating point.
struct MirrorCoupling {
  cplx alpha1{0, 0}, alpha2{0, 0};  // mirror-mirror rates
  cplx kappa_p1{0, 0}, kappa_p2{0, 0}, kappa_combined{0, 0};
  double delta1 = 0, delta2 = 0;  // drive detunings, locked to -omega_m_j
  double gamma_m1 = 0, gamma_m2 = 0;
  double n1 = 0, n2 = 0;  // mirror bath occupations

  // cavity-noise feeds into each mirror (self = kappa'-weighted, cross =
  // coherence-weighted) and the base Langevin correlators
  cplx feed_self1{0, 0}, feed_cross1{0, 0};
  cplx feed_self2{0, 0}, feed_cross2{0, 0};
  double u1 = 0, v1 = 0, u2 = 0, v2 = 0;  // <F^dag F>/2delta, <F F^dag>/2delta
  cplx w{0, 0};                           // <F2 F1> coefficient

  std::vector<std::string> warnings;
};

MirrorCoupling mirror_coupling(const GainCoefficients& gain,
                               const SteadyStateBranch& steady,
                               const SystemConfig& cfg,
                               const DerivedParams& der);

// Real 2x2 block of the quadrature equations for
//   db/dt = c1 * b' + c2 * b'^dagger     (b = (q + ip)/sqrt(2)).
// The self term of a mode is lift_block(c0, 0).
Eigen::Matrix2d lift_block(cplx c1, cplx c2);

// Inverse of lift_block: recovers (c1, c2) from a 2x2 block.
std::pair<cplx, cplx> project_block(const Eigen::Matrix2d& m);

// Drift matrix M(t) over u = (dq1, dp1, dq2, dp2); exact oscillating entries.
Eigen::Matrix4d drift_matrix(const MirrorCoupling& c, double t);

// Equal-time quadrature noise matrix: <n_l(t) n_m(t')> = Dc(t) delta(t-t').
// Hermitian; its real part is the symmetric diffusion matrix.
Eigen::Matrix4cd noise_matrix(const MirrorCoupling& c, double t);

// Real symmetric PSD part of the noise matrix; throws DynamicsError if an
// eigenvalue is below -1e-12 * ||D||.
Eigen::Matrix4d diffusion_matrix(const MirrorCoupling& c, double t);

// R(0) for independent thermal mirrors.
Eigen::Matrix4cd thermal_initial_state(double n1, double n2);

struct CovarianceTrajectory {
  std::vector<double> times;
  std::vector<Eigen::Matrix4cd> R;  // second moments <u_l u_l'>
  std::vector<Eigen::Matrix4d> V;   // Re R, symmetrized
  std::vector<Eigen::Matrix4d> G;   // propagator, G(0) = I
  std::vector<Eigen::Vector4d> mean;
  double dt = 0;
  double halving_diff = -1;  // max |R_dt - R_dt/2| at t_end, if checked
};

struct PropagateOptions {
  int sample_stride = 1;      // store every k-th step
  double halving_tol = 0;     // > 0: verify dt-halving changes R(t_end) less
  Eigen::Vector4d mean0 = Eigen::Vector4d::Zero();
};

using DriftFn = std::function<Eigen::Matrix4d(double)>;
using NoiseFn = std::function<Eigen::Matrix4cd(double)>;

CovarianceTrajectory propagate(const DriftFn& M, const NoiseFn& D,
                               const Eigen::Matrix4cd& R0, double t_end,
                               double dt, const PropagateOptions& opts = {});

// Default integration step for a coupling: resolves the fastest of the
// 2 delta_j phases, the cavity response and the mirror decay.
double default_time_step(const MirrorCoupling& c, double kappa1, double kappa2);

}  // namespace ramanopt
