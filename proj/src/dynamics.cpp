#include "ramanopt/dynamics.hpp"

#include <cmath>

#include "ramanopt/constants.hpp"

namespace ramanopt {

namespace {
constexpr cplx I{0.0, 1.0};
}

MirrorCoupling mirror_coupling(const GainCoefficients& gain,
                               const SteadyStateBranch& steady,
                               const SystemConfig& cfg,
                               const DerivedParams& der) {
  MirrorCoupling c;
  const auto er = effective_rates(gain, cfg.cavity[0].kappa, cfg.cavity[1].kappa);
  c.kappa_p1 = er.kappa_p1;
  c.kappa_p2 = er.kappa_p2;
  c.kappa_combined = er.kappa_combined;
  const double kscale = std::max(std::abs(c.kappa_p1 * c.kappa_p2),
                                 std::abs(4.0 * gain.xi12 * gain.xi21));
  if (std::abs(c.kappa_combined) < 1e-12 * kscale)
    throw DynamicsError("combined cavity rate kappa is singular "
                        "(gain compensates loss)");

  c.delta1 = -cfg.mirror[0].omega_m;
  c.delta2 = -cfg.mirror[1].omega_m;
  c.gamma_m1 = cfg.mirror[0].gamma_m;
  c.gamma_m2 = cfg.mirror[1].gamma_m;
  c.n1 = der.n[0];
  c.n2 = der.n[1];

  for (int j = 0; j < 2; ++j)
    if (cfg.cavity[j].kappa < 10.0 * cfg.mirror[j].gamma_m)
      c.warnings.push_back("adiabatic regime kappa_" + std::to_string(j + 1) +
                           " >> gamma_m_" + std::to_string(j + 1) +
                           " is violated; eliminated-cavity dynamics is "
                           "outside its validity range");

  const double m1 = std::abs(steady.a1_mean);
  const double m2 = std::abs(steady.a2_mean);
  const double G1 = der.G[0], G2 = der.G[1];
  c.alpha1 = 4.0 * gain.xi12 / c.kappa_combined * G1 * G2 * m1 * m2;
  c.alpha2 = 4.0 * gain.xi21 / c.kappa_combined * G1 * G2 * m1 * m2;

  c.feed_self1 = 2.0 * c.kappa_p2 / c.kappa_combined * G1 * m1;
  c.feed_cross1 = 4.0 * gain.xi12 / c.kappa_combined * G1 * m1;
  c.feed_self2 = 2.0 * c.kappa_p1 / c.kappa_combined * G2 * m2;
  c.feed_cross2 = 4.0 * gain.xi21 / c.kappa_combined * G2 * m2;

  c.u1 = std::real(gain.xi[0]) + cfg.cavity[0].kappa * cfg.cavity[0].N;
  c.v1 = std::real(gain.xi[1]) + cfg.cavity[0].kappa * (cfg.cavity[0].N + 1.0);
  c.u2 = std::real(gain.xi[3]) + cfg.cavity[1].kappa * cfg.cavity[1].N;
  c.v2 = std::real(gain.xi[2]) + cfg.cavity[1].kappa * (cfg.cavity[1].N + 1.0);
  c.w = std::conj(gain.xi[5]) + gain.xi[7];
  return c;
}

Eigen::Matrix2d lift_block(cplx c1, cplx c2) {
  Eigen::Matrix2d b;
  b << (c1 + c2).real(), (c2 - c1).imag(),
       (c1 + c2).imag(), (c1 - c2).real();
  return b;
}

std::pair<cplx, cplx> project_block(const Eigen::Matrix2d& m) {
  const cplx c1 = 0.5 * cplx(m(0, 0) + m(1, 1), m(1, 0) - m(0, 1));
  const cplx c2 = 0.5 * cplx(m(0, 0) - m(1, 1), m(1, 0) + m(0, 1));
  return {c1, c2};
}

Eigen::Matrix4d drift_matrix(const MirrorCoupling& c, double t) {
  const cplx e2d1 = std::exp(2.0 * I * c.delta1 * t);
  const cplx e2d2 = std::exp(2.0 * I * c.delta2 * t);
  const cplx esum = std::exp(-2.0 * I * (c.delta1 + c.delta2) * t);
  const cplx c1 = c.alpha1 * (e2d2 - std::conj(e2d1));
  const cplx c2 = c.alpha1 * (1.0 - esum);
  const cplx d1 = c.alpha2 * (std::conj(e2d2) - e2d1);
  const cplx d2 = c.alpha2 * (esum - 1.0);

  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M.block<2, 2>(0, 0) = lift_block(cplx(-c.gamma_m1 / 2.0, 0.0), cplx(0, 0));
  M.block<2, 2>(0, 2) = lift_block(c1, c2);
  M.block<2, 2>(2, 0) = lift_block(d1, d2);
  M.block<2, 2>(2, 2) = lift_block(cplx(-c.gamma_m2 / 2.0, 0.0), cplx(0, 0));
  return M;
}

Eigen::Matrix4cd noise_matrix(const MirrorCoupling& c, double t) {
  using Eigen::Matrix;
  // noise basis (F1, F1^dag, F2, F2^dag, f1, f1^dag, f2, f2^dag)
  Matrix<cplx, 8, 8> S0 = Matrix<cplx, 8, 8>::Zero();
  S0(0, 1) = 2.0 * c.v1;
  S0(1, 0) = 2.0 * c.u1;
  S0(2, 3) = 2.0 * c.v2;
  S0(3, 2) = 2.0 * c.u2;
  S0(0, 2) = S0(2, 0) = c.w;
  S0(1, 3) = S0(3, 1) = std::conj(c.w);
  S0(4, 5) = c.n1 + 1.0;
  S0(5, 4) = c.n1;
  S0(6, 7) = c.n2 + 1.0;
  S0(7, 6) = c.n2;

  const cplx ph1 = std::exp(-2.0 * I * c.delta1 * t);
  const cplx ph2 = std::exp(-2.0 * I * c.delta2 * t);
  const double sg1 = std::sqrt(c.gamma_m1), sg2 = std::sqrt(c.gamma_m2);

  // rows (Ft1, Ft1^dag, Ft2, Ft2^dag) over the noise basis
  Matrix<cplx, 4, 8> T = Matrix<cplx, 4, 8>::Zero();
  T(0, 0) = c.feed_self1 * ph1;
  T(0, 1) = -c.feed_self1;
  T(0, 2) = -c.feed_cross1;
  T(0, 3) = c.feed_cross1 * ph1;
  T(0, 4) = sg1;
  T(1, 0) = -std::conj(c.feed_self1);
  T(1, 1) = std::conj(c.feed_self1 * ph1);
  T(1, 2) = std::conj(c.feed_cross1 * ph1);
  T(1, 3) = -std::conj(c.feed_cross1);
  T(1, 5) = sg1;
  T(2, 0) = c.feed_cross2;
  T(2, 1) = -c.feed_cross2 * ph2;
  T(2, 2) = c.feed_self2 * ph2;
  T(2, 3) = -c.feed_self2;
  T(2, 6) = sg2;
  T(3, 0) = -std::conj(c.feed_cross2 * ph2);
  T(3, 1) = std::conj(c.feed_cross2);
  T(3, 2) = -std::conj(c.feed_self2);
  T(3, 3) = std::conj(c.feed_self2 * ph2);
  T(3, 7) = sg2;

  const Matrix<cplx, 4, 4> S = T * S0 * T.transpose();

  // quadrature map n_q = (F + F^dag)/sqrt2, n_p = i(F^dag - F)/sqrt2
  Matrix<cplx, 4, 4> Q = Matrix<cplx, 4, 4>::Zero();
  const double r2 = 1.0 / std::sqrt(2.0);
  Q(0, 0) = r2;
  Q(0, 1) = r2;
  Q(1, 0) = -I * r2;
  Q(1, 1) = I * r2;
  Q(2, 2) = r2;
  Q(2, 3) = r2;
  Q(3, 2) = -I * r2;
  Q(3, 3) = I * r2;

  Eigen::Matrix4cd Dc = Q * S * Q.transpose();
  // enforce exact Hermiticity against round-off
  Dc = 0.5 * (Dc + Dc.adjoint()).eval();
  return Dc;
}

Eigen::Matrix4d diffusion_matrix(const MirrorCoupling& c, double t) {
  Eigen::Matrix4d D = noise_matrix(c, t).real();
  D = 0.5 * (D + D.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(D);
  const double scale = D.norm();
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(scale, 1e-300))
    throw DynamicsError("diffusion matrix is not positive semidefinite");
  return D;
}

Eigen::Matrix4cd thermal_initial_state(double n1, double n2) {
  if (n1 < 0 || n2 < 0) throw DynamicsError("thermal occupation must be >= 0");
  Eigen::Matrix4cd R = Eigen::Matrix4cd::Zero();
  R(0, 0) = R(1, 1) = n1 + 0.5;
  R(2, 2) = R(3, 3) = n2 + 0.5;
  R(0, 1) = I * 0.5;
  R(1, 0) = -I * 0.5;
  R(2, 3) = I * 0.5;
  R(3, 2) = -I * 0.5;
  return R;
}

namespace {

struct PropState {
  Eigen::Matrix4cd R;
  Eigen::Matrix4d G;
};

// one RK4 step of dR/dt = M R + R M^T + D, dG/dt = M G
PropState rk4_step(const DriftFn& Mf, const NoiseFn& Df, const PropState& s,
                   double t, double dt) {
  auto rhs = [&](const PropState& x, double tt) {
    const Eigen::Matrix4d M = Mf(tt);
    PropState d;
    d.R = M * x.R + x.R * M.transpose() + Df(tt);
    d.G = M * x.G;
    return d;
  };
  const PropState k1 = rhs(s, t);
  PropState x2{s.R + 0.5 * dt * k1.R, s.G + 0.5 * dt * k1.G};
  const PropState k2 = rhs(x2, t + 0.5 * dt);
  PropState x3{s.R + 0.5 * dt * k2.R, s.G + 0.5 * dt * k2.G};
  const PropState k3 = rhs(x3, t + 0.5 * dt);
  PropState x4{s.R + dt * k3.R, s.G + dt * k3.G};
  const PropState k4 = rhs(x4, t + dt);
  return {s.R + (dt / 6.0) * (k1.R + 2.0 * k2.R + 2.0 * k3.R + k4.R),
          s.G + (dt / 6.0) * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G)};
}

Eigen::Matrix4cd run_to(const DriftFn& Mf, const NoiseFn& Df,
                        const Eigen::Matrix4cd& R0, double t_end, double dt) {
  PropState s{R0, Eigen::Matrix4d::Identity()};
  const long n = std::lround(std::ceil(t_end / dt - 1e-9));
  double t = 0;
  for (long k = 0; k < n; ++k) {
    const double step = std::min(dt, t_end - t);
    s = rk4_step(Mf, Df, s, t, step);
    t += step;
  }
  return s.R;
}

}  // namespace

CovarianceTrajectory propagate(const DriftFn& Mf, const NoiseFn& Df,
                               const Eigen::Matrix4cd& R0, double t_end,
                               double dt, const PropagateOptions& opts) {
  if (!(dt > 0)) throw DynamicsError("propagate: dt must be > 0");
  if (!(t_end >= 0)) throw DynamicsError("propagate: t_end must be >= 0");
  if ((R0 - R0.adjoint()).norm() > 1e-9 * std::max(R0.norm(), 1e-300))
    throw DynamicsError("propagate: R0 must be Hermitian");

  CovarianceTrajectory traj;
  traj.dt = dt;
  PropState s{R0, Eigen::Matrix4d::Identity()};
  const int stride = std::max(opts.sample_stride, 1);
  double t = 0;
  long k = 0;
  auto sample = [&] {
    traj.times.push_back(t);
    traj.R.push_back(s.R);
    Eigen::Matrix4d V = s.R.real();
    traj.V.push_back(0.5 * (V + V.transpose()));
    traj.G.push_back(s.G);
    traj.mean.push_back(s.G * opts.mean0);
  };
  sample();
  while (t < t_end * (1.0 - 1e-12)) {
    const double step = std::min(dt, t_end - t);
    s = rk4_step(Mf, Df, s, t, step);
    t += step;
    ++k;
    if (k % stride == 0 || t >= t_end * (1.0 - 1e-12)) sample();
  }

  if (opts.halving_tol > 0 && t_end > 0) {
    const Eigen::Matrix4cd R_half = run_to(Mf, Df, R0, t_end, dt / 2.0);
    traj.halving_diff = (traj.R.back() - R_half).cwiseAbs().maxCoeff();
    const double scale = std::max(R_half.norm(), 1e-300);
    if (traj.halving_diff > opts.halving_tol * scale)
      throw DynamicsError("propagate: step size not converged (halving dt "
                          "moved R(t_end) by " + std::to_string(traj.halving_diff) + ")");
  }
  return traj;
}

double default_time_step(const MirrorCoupling& c, double kappa1, double kappa2) {
  const double w1 = std::abs(c.delta1), w2 = std::abs(c.delta2);
  const double wm = std::max(w1, w2);
  double dt = two_pi / std::max(wm, 1e-300);
  dt = std::min(dt, 1.0 / std::max(kappa1, kappa2));
  dt = std::min(dt, 1.0 / std::max({c.gamma_m1, c.gamma_m2, 1e-300}));
  return dt / 200.0;
}

}  // namespace ramanopt
