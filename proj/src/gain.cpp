#include "ramanopt/gain.hpp"

#include <algorithm>
#include <cmath>

namespace ramanopt {

namespace {
constexpr cplx I{0.0, 1.0};
}

PopulationSolution solve_populations(const AtomicConfig& a) {
  PopulationSolution s;
  const double dJ = a.Delta_c - a.Delta_2 - a.Delta_1;
  s.chi = a.gamma_ab * a.gamma_ab + a.Delta_c * a.Delta_c;
  s.chi_prime = a.gamma_cd * a.gamma_cd + dJ * dJ;
  s.d = 2.0 * a.Omega * a.Omega * a.gamma_ab * (a.gamma_a + a.gamma_b) +
        s.chi * a.gamma_b * a.gamma_a;
  s.d_prime = 2.0 * a.Omega_p * a.Omega_p * a.gamma_cd * (a.gamma_c + a.gamma_d) +
              a.gamma_c * a.gamma_d * s.chi_prime;
  if (s.d == 0.0 || s.d_prime == 0.0)
    throw GainError("degenerate population normalizer (d or d' is zero)");

  const double half_m = 0.5 * (1.0 - a.eta);
  const double half_p = 0.5 * (1.0 + a.eta);
  s.Z_aa = (2.0 * a.Omega * a.Omega * a.gamma_ab + a.gamma_b * s.chi) * half_m;
  s.Z_ab = I * a.Omega * a.gamma_b * s.chi / cplx(a.gamma_ab, a.Delta_c) * half_m;
  s.Z_bb = a.Omega * a.Omega * a.gamma_ab * (1.0 - a.eta);
  s.Z_cc = (2.0 * a.Omega_p * a.Omega_p * a.gamma_cd + a.gamma_d * s.chi_prime) * half_p;
  s.Z_dd = a.Omega_p * a.Omega_p * a.gamma_cd * (1.0 + a.eta);
  s.Z_cd = I * a.Omega_p * a.gamma_d * s.chi_prime / cplx(a.gamma_cd, dJ) * half_p;
  return s;
}

AtomicDenominators compute_denominators(const AtomicConfig& a) {
  const cplx den_bc(a.gamma_bc, -(a.Delta_c - a.Delta_2));
  const cplx den_ad(a.gamma_ad, a.Delta_c - a.Delta_1);
  if (den_bc == cplx(0, 0) || den_ad == cplx(0, 0))
    throw GainError("division by zero in A/B/D (gamma_bc - i(Dc-D2) or "
                    "gamma_ad + i(Dc-D1) vanishes)");
  const double Om2 = a.Omega * a.Omega;
  const double Omp2 = a.Omega_p * a.Omega_p;
  const double OmOmp = a.Omega * a.Omega_p;
  AtomicDenominators r;
  r.A = -cplx(a.gamma_ac, a.Delta_2) - Om2 / den_bc - Omp2 / den_ad;
  r.B = OmOmp / den_bc + OmOmp / den_ad;
  r.D = -cplx(a.gamma_bd, -a.Delta_1) - Om2 / den_ad - Omp2 / den_bc;
  return r;
}

GainCoefficients compute_xi(const PopulationSolution& pop,
                            const AtomicDenominators& den,
                            double g1, double g2, double r_a) {
  const cplx det = den.B * den.B - den.A * den.D;
  const double scale = std::max(std::norm(den.B), std::abs(den.A * den.D));
  if (std::abs(det) < 1e-12 * scale)
    throw GainError("singular denominator B^2 - AD");

  const double wd = r_a / pop.d;
  const double wdp = r_a / pop.d_prime;
  GainCoefficients gc;
  gc.xi[0] = g1 * g1 * den.A / det * wdp * pop.Z_dd;
  gc.xi[1] = g1 * g1 * den.A / det * wd * pop.Z_bb;
  gc.xi[2] = g2 * g2 * den.D / det * wdp * pop.Z_cc;
  gc.xi[3] = g2 * g2 * den.D / det * wd * pop.Z_aa;
  gc.xi[4] = g1 * g2 * den.B / det * wd * pop.Z_aa;
  gc.xi[5] = g1 * g2 * den.B / det * wdp * pop.Z_cc;
  gc.xi[6] = g1 * g2 * den.B / det * wd * pop.Z_bb;
  gc.xi[7] = g1 * g2 * den.B / det * wdp * pop.Z_dd;
  gc.xi11 = std::conj(gc.xi[0]) - std::conj(gc.xi[1]);
  gc.xi12 = std::conj(gc.xi[4]) - std::conj(gc.xi[5]);
  gc.xi21 = gc.xi[6] - gc.xi[7];
  gc.xi22 = gc.xi[2] - gc.xi[3];
  gc.eta1 = gc.xi11;
  gc.eta2 = gc.xi22;
  return gc;
}

GainCoefficients compute_xi(const AtomicConfig& atomic) {
  return compute_xi(solve_populations(atomic), compute_denominators(atomic),
                    atomic.g1, atomic.g2, atomic.r_a);
}

EffectiveCavityRates effective_rates(const GainCoefficients& gc,
                                     double kappa1, double kappa2) {
  EffectiveCavityRates r;
  r.kappa_p1 = kappa1 - 2.0 * gc.xi11;
  r.kappa_p2 = kappa2 + 2.0 * gc.xi22;
  r.kappa_combined = r.kappa_p1 * r.kappa_p2 + 4.0 * gc.xi12 * gc.xi21;
  return r;
}

namespace {

// Zeroth-order density-matrix state: populations aa, bb, cc, dd and the
// coherences ab, cd, ad, bc (the a<->c and b<->d coherences are first
// order in the quantum couplings and enter these equations as zero).
struct ZerothState {
  double aa = 0, bb = 0, cc = 0, dd = 0;
  cplx ab{0, 0}, cd{0, 0}, ad{0, 0}, bc{0, 0};
};

ZerothState operator+(const ZerothState& x, const ZerothState& y) {
  return {x.aa + y.aa, x.bb + y.bb, x.cc + y.cc, x.dd + y.dd,
          x.ab + y.ab, x.cd + y.cd, x.ad + y.ad, x.bc + y.bc};
}

ZerothState operator*(double s, const ZerothState& x) {
  return {s * x.aa, s * x.bb, s * x.cc, s * x.dd,
          s * x.ab, s * x.cd, s * x.ad, s * x.bc};
}

ZerothState zeroth_rhs(const AtomicConfig& a, const ZerothState& r) {
  constexpr cplx I{0.0, 1.0};
  const double inj_a = a.r_a * 0.5 * (1.0 - a.eta);
  const double inj_c = a.r_a * 0.5 * (1.0 + a.eta);
  ZerothState f;
  f.aa = inj_a - std::real(I * a.Omega * (std::conj(r.ab) - r.ab)) - a.gamma_a * r.aa;
  f.bb = -std::real(I * a.Omega * (r.ab - std::conj(r.ab))) - a.gamma_b * r.bb;
  f.cc = inj_c - std::real(I * a.Omega_p * (std::conj(r.cd) - r.cd)) - a.gamma_c * r.cc;
  f.dd = -std::real(I * a.Omega_p * (r.cd - std::conj(r.cd))) - a.gamma_d * r.dd;
  f.ad = -cplx(a.gamma_ad, a.Delta_c - a.Delta_1) * r.ad;  // rho_bd, rho_ac ~ O(g)
  f.bc = -cplx(a.gamma_bc, -(a.Delta_c - a.Delta_2)) * r.bc;
  f.ab = -cplx(a.gamma_ab, a.Delta_c) * r.ab - I * a.Omega * (r.bb - r.aa);
  f.cd = -cplx(a.gamma_cd, a.Delta_c - a.Delta_1 - a.Delta_2) * r.cd -
         I * a.Omega_p * (r.dd - r.cc);
  return f;
}

double state_norm(const ZerothState& s) {
  return std::abs(s.aa) + std::abs(s.bb) + std::abs(s.cc) + std::abs(s.dd) +
         std::abs(s.ab) + std::abs(s.cd) + std::abs(s.ad) + std::abs(s.bc);
}

}  // namespace

PopulationOdeReport check_populations_against_ode(const AtomicConfig& a,
                                                  double tol) {
  for (double g : {a.gamma_a, a.gamma_b, a.gamma_c, a.gamma_d, a.gamma_ab,
                   a.gamma_cd, a.gamma_ad, a.gamma_bc})
    if (!(g > 0))
      throw GainError("check_populations_against_ode requires all gamma > 0");

  const double rate_max =
      std::max({a.gamma_a, a.gamma_b, a.gamma_c, a.gamma_d, a.gamma_ab,
                a.gamma_cd, a.gamma_ad, a.gamma_bc,
                2.0 * a.Omega, 2.0 * a.Omega_p,
                std::abs(a.Delta_c), std::abs(a.Delta_1), std::abs(a.Delta_2)});
  const double rate_min =
      std::min({a.gamma_a, a.gamma_b, a.gamma_c, a.gamma_d, a.gamma_ab, a.gamma_cd});
  const double dt = 0.4 / rate_max;
  const double t_max = 200.0 / rate_min;

  PopulationOdeReport rep;
  ZerothState r{};
  double t = 0;
  const double inj_scale = std::max(a.r_a, 1.0);
  while (t < t_max) {
    for (int k = 0; k < 64 && t < t_max; ++k, t += dt, ++rep.steps) {
      const ZerothState k1 = zeroth_rhs(a, r);
      const ZerothState k2 = zeroth_rhs(a, r + 0.5 * dt * k1);
      const ZerothState k3 = zeroth_rhs(a, r + 0.5 * dt * k2);
      const ZerothState k4 = zeroth_rhs(a, r + dt * k3);
      r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (state_norm(zeroth_rhs(a, r)) <= 1e-14 * inj_scale) {
      rep.converged = true;
      break;
    }
  }
  rep.integration_time = t;
  if (!rep.converged &&
      state_norm(zeroth_rhs(a, r)) <= 1e-10 * inj_scale)
    rep.converged = true;  // slow tail but already at the requested accuracy
  if (!rep.converged)
    throw GainError("zeroth-order ODE integration did not reach steady state");

  const PopulationSolution p = solve_populations(a);
  const double wd = a.r_a / p.d;
  const double wdp = a.r_a / p.d_prime;
  const cplx closed[6] = {wd * p.Z_aa, wd * p.Z_bb, wd * p.Z_ab,
                          wdp * p.Z_cc, wdp * p.Z_dd, wdp * p.Z_cd};
  const cplx integ[6] = {r.aa, r.bb, r.ab, r.cc, r.dd, r.cd};
  double scale = 0;
  for (const cplx& c : closed) scale = std::max(scale, std::abs(c));
  for (int i = 0; i < 6; ++i) {
    const double denom = std::max(std::abs(closed[i]), scale);
    rep.per_element[i] = denom > 0 ? std::abs(integ[i] - closed[i]) / denom : 0.0;
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, rep.per_element[i]);
  }
  rep.pass = rep.max_rel_deviation <= tol;
  return rep;
}

}  // namespace ramanopt
