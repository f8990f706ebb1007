#pragma once

#include <array>
#include <complex>
#include <stdexcept>

#include "ramanopt/config.hpp"

namespace ramanopt {

using cplx = std::complex<double>;

class GainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Steady-state atomic population factors of the two driven two-level blocks
// (a,b) and (c,d), with the scalar density normalization set to 1.
struct PopulationSolution {
  double Z_aa = 0, Z_bb = 0, Z_cc = 0, Z_dd = 0;
  cplx Z_ab{0, 0}, Z_cd{0, 0};
  double d = 0, d_prime = 0;      // normalizers
  double chi = 0, chi_prime = 0;  // resonance factors
};

struct AtomicDenominators {
  cplx A{0, 0}, B{0, 0}, D{0, 0};
};

// The eight master-equation coefficients and their derived combinations.
struct GainCoefficients {
  std::array<cplx, 8> xi{};  // xi[0] = xi_1 ... xi[7] = xi_8
  cplx xi11{0, 0};           // xi_1^* - xi_2^*
  cplx xi12{0, 0};           // xi_5^* - xi_6^*
  cplx xi21{0, 0};           // xi_7 - xi_8
  cplx xi22{0, 0};           // xi_3 - xi_4
  cplx eta1{0, 0};           // = xi11
  cplx eta2{0, 0};           // = xi22
};

// Effective cavity rates once the bare decays kappa_j are known.
struct EffectiveCavityRates {
  cplx kappa_p1{0, 0};        // kappa_1 - 2 xi11
  cplx kappa_p2{0, 0};        // kappa_2 + 2 xi22
  cplx kappa_combined{0, 0};  // kappa_p1 kappa_p2 + 4 xi12 xi21
};

PopulationSolution solve_populations(const AtomicConfig& atomic);
AtomicDenominators compute_denominators(const AtomicConfig& atomic);
GainCoefficients compute_xi(const PopulationSolution& pop,
                            const AtomicDenominators& den,
                            double g1, double g2, double r_a);
GainCoefficients compute_xi(const AtomicConfig& atomic);

EffectiveCavityRates effective_rates(const GainCoefficients& gc,
                                     double kappa1, double kappa2);

// Cross-check of the closed forms against a direct integration of the
// zeroth-order density-matrix equations of motion to steady state.
struct PopulationOdeReport {
  double max_rel_deviation = 0;  // over the six closed-form elements
  bool pass = false;
  bool converged = false;
  double integration_time = 0;  // simulated time at stop
  long steps = 0;
  std::array<double, 6> per_element{};  // aa, bb, ab, cc, dd, cd
};

PopulationOdeReport check_populations_against_ode(const AtomicConfig& atomic,
                                                  double tol);

}  // namespace ramanopt
