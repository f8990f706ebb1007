#include <doctest.h>

#include <cmath>
#include <random>

#include "ramanopt/constants.hpp"
#include "ramanopt/steady_state.hpp"

using namespace ramanopt;

namespace {

// Independent root counter: sign-change scan + bisection on the cubic,
// no closed-form root formulas involved.
int count_roots_scan(double c3, double c2, double c1, double c0, double I_max) {
  auto f = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  const int n = 20000;
  int count = 0;
  double prev = f(0.0);
  if (prev == 0.0) ++count;
  for (int i = 1; i <= n; ++i) {
    const double x = I_max * i / n;
    const double cur = f(x);
    if (cur == 0.0 || (cur < 0) != (prev < 0)) ++count;
    prev = cur;
  }
  return count;
}

SteadyStateParams bare_params(double kappa, double beta) {
  SteadyStateParams p;        // zero gain: a bare Kerr-type cavity
  p.kappa1 = p.kappa2 = kappa;
  p.beta1 = p.beta2 = beta;
  p.G1 = p.G2 = 1.0;
  return p;
}

SteadyStateParams coupled_params() {
  SteadyStateParams p;
  p.kappa1 = 1.0;
  p.kappa2 = 1.3;
  p.beta1 = 0.05;
  p.beta2 = 0.04;
  p.G1 = p.G2 = 1.0;
  p.gain.xi12 = cplx(0.21, 0.05);
  p.gain.xi21 = cplx(0.17, -0.03);
  p.gain.eta1 = cplx(0.02, 0.01);
  p.gain.eta2 = cplx(0.04, -0.02);
  p.gain.xi11 = p.gain.eta1;
  p.gain.xi22 = p.gain.eta2;
  return p;
}

}  // namespace

TEST_CASE("cubic solver against the scan oracle") {
  std::mt19937 rng(9001);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r1 = u(rng), r2 = u(rng), r3 = u(rng);
    // polynomial with known roots
    const double c3 = 1.0, c2 = -(r1 + r2 + r3);
    const double c1 = r1 * r2 + r1 * r3 + r2 * r3, c0 = -r1 * r2 * r3;
    const auto roots = solve_cubic_real(c3, c2, c1, c0);
    REQUIRE(roots.size() == 3);
    double expect[3] = {r1, r2, r3};
    std::sort(expect, expect + 3);
    for (int i = 0; i < 3; ++i)
      CHECK(roots[i] == doctest::Approx(expect[i]).epsilon(1e-7));
  }
  SUBCASE("degenerate leading coefficients") {
    auto q = solve_cubic_real(0.0, 1.0, -3.0, 2.0);  // (x-1)(x-2)
    REQUIRE(q.size() == 2);
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[1] == doctest::Approx(2.0));
    auto l = solve_cubic_real(0.0, 0.0, 2.0, -4.0);
    REQUIRE(l.size() == 1);
    CHECK(l[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("rwa_branches limits") {
  SUBCASE("linear cavity (beta = 0)") {
    SteadyStateParams p = coupled_params();
    p.beta1 = 0.0;
    const double d0 = 0.7, eps = 1.3;
    const auto r = rwa_branches(p, 1, d0, eps);
    REQUIRE(r.branches.size() == 1);
    // I = eps^2 / ((d0 + Im eta (-1)^j)^2 + (kappa/2 + (-1)^j Re eta)^2), j = 1
    const double y = -p.gain.eta1.imag();
    const double x = p.kappa1 / 2.0 - p.gain.eta1.real();
    const double expect = eps * eps / ((d0 + y) * (d0 + y) + x * x);
    CHECK(r.branches[0].I1 == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.branches[0].stable == Stability::stable);
  }
  SUBCASE("undriven cavity") {
    const auto r = rwa_branches(bare_params(1.0, 0.2), 1, 0.5, 0.0);
    REQUIRE(r.branches.size() == 1);
    CHECK(r.branches[0].I1 == 0.0);
  }
  SUBCASE("conjugate consistency and mirror shift") {
    const auto r = rwa_branches(coupled_params(), 2, -0.4, 0.9);
    for (const auto& b : r.branches) {
      CHECK(std::norm(b.a2_mean) == doctest::Approx(b.I2).epsilon(1e-10));
      CHECK(b.mirror_shift2 ==
            doctest::Approx(-coupled_params().beta2 * b.I2).epsilon(1e-12));
    }
  }
}

TEST_CASE("rwa_branches finds the full S-curve") {
  // strong Kerr response: three roots in a drive window
  SteadyStateParams p = bare_params(0.2, 1.0);
  const double d0 = 2.0;
  int max_count = 0;
  for (double eps2 = 0.05; eps2 < 4.0; eps2 += 0.05) {
    const auto r = rwa_branches(p, 1, d0, std::sqrt(eps2));
    const double x = p.kappa1 / 2.0;
    const int oracle =
        count_roots_scan(p.beta1 * p.beta1, -2.0 * p.beta1 * d0,
                         d0 * d0 + x * x, -eps2, 50.0);
    CHECK(static_cast<int>(r.branches.size()) == oracle);
    max_count = std::max<int>(max_count, r.branches.size());
    for (const auto& b : r.branches) CHECK(b.residual1 <= 1e-10);
    if (r.branches.size() == 3) {
      CHECK(r.branches[0].stable == Stability::stable);
      CHECK(r.branches[1].stable == Stability::unstable);
      CHECK(r.branches[2].stable == Stability::stable);
    }
  }
  CHECK(max_count == 3);
}

TEST_CASE("brwa decouples to the rwa when the coherence vanishes") {
  SteadyStateParams p = coupled_params();
  p.gain.xi12 = p.gain.xi21 = cplx(0, 0);
  const double d0 = 1.1, eps = 2.0, mu = 0.7;
  const auto joint = brwa_mean_fields(p, d0, eps, mu);
  const auto r1 = rwa_branches(p, 1, d0, eps);
  const auto r2 = rwa_branches(p, 2, -d0, mu * eps);
  REQUIRE(!joint.branches.empty());
  REQUIRE(!r1.branches.empty());
  REQUIRE(!r2.branches.empty());
  // every joint solution pairs an rwa mode-1 branch with an rwa mode-2 branch
  for (const auto& b : joint.branches) {
    double best1 = 1e300, best2 = 1e300;
    for (const auto& c : r1.branches)
      best1 = std::min(best1, std::abs(b.I1 - c.I1) / std::max(c.I1, 1e-300));
    for (const auto& c : r2.branches)
      best2 = std::min(best2, std::abs(b.I2 - c.I2) / std::max(c.I2, 1e-300));
    CHECK(best1 <= 1e-8);
    CHECK(best2 <= 1e-8);
  }
  CHECK(joint.branches.size() == r1.branches.size() * r2.branches.size());
}

TEST_CASE("brwa solutions satisfy both defining relations and consistency") {
  const SteadyStateParams p = coupled_params();
  for (double eps : {0.5, 1.5, 3.0, 6.0}) {
    const auto r = brwa_mean_fields(p, 1.4, eps, 0.4);
    REQUIRE(!r.branches.empty());
    for (const auto& b : r.branches) {
      CHECK(b.residual1 <= 1e-10);
      CHECK(b.residual2 <= 1e-10);
      CHECK(std::norm(b.a1_mean) == doctest::Approx(b.I1).epsilon(1e-9));
      CHECK(std::norm(b.a2_mean) == doctest::Approx(b.I2).epsilon(1e-9));
    }
  }
}

TEST_CASE("brwa undriven limit") {
  const auto r = brwa_mean_fields(coupled_params(), 1.0, 0.0, 0.5);
  REQUIRE(r.branches.size() == 1);
  CHECK(r.branches[0].I1 == 0.0);
  CHECK(r.branches[0].I2 == 0.0);
}

TEST_CASE("small-mu ratio approaches the limit cubic") {
  SteadyStateParams p = coupled_params();
  p.beta1 = 1e-6;  // deep in the mu^2 beta1 I1 << |xi21|^2 regime
  p.beta2 = 0.04;
  const double mu = 0.1, d0 = 1.2, eps = 1.0;
  const auto r = brwa_mean_fields(p, d0, eps, mu);
  REQUIRE(!r.branches.empty());
  for (const auto& b : r.branches) {
    if (b.I2 <= 0) continue;
    const cplx a2c = std::conj(-cplx(0, 1) * (d0 + p.beta2 * b.I2) +
                               p.kappa2 / 2.0 + p.gain.eta2);
    const cplx a1_approx = -cplx(0, 1) * d0 + p.kappa1 / 2.0 -
                           std::conj(p.gain.eta1);  // xi1 - xi2
    const double ratio_cubic = std::norm(a2c + mu * p.gain.xi12) /
                               std::norm(mu * a1_approx - p.gain.xi21);
    CHECK(b.I1 / b.I2 == doctest::Approx(ratio_cubic).epsilon(1e-4));
  }
}

TEST_CASE("classify_stability positional rules") {
  auto mk = [](double I) {
    SteadyStateBranch b;
    b.I1 = I;
    return b;
  };
  SUBCASE("single root stable") {
    std::vector<SteadyStateBranch> v{mk(1.0)};
    classify_stability(v);
    CHECK(v[0].stable == Stability::stable);
  }
  SUBCASE("three distinct roots: stable/unstable/stable") {
    std::vector<SteadyStateBranch> v{mk(1.0), mk(2.0), mk(3.0)};
    classify_stability(v);
    CHECK(v[0].stable == Stability::stable);
    CHECK(v[1].stable == Stability::unstable);
    CHECK(v[2].stable == Stability::stable);
  }
  SUBCASE("fold pair flagged unknown") {
    std::vector<SteadyStateBranch> v{mk(1.0), mk(1.0 + 1e-9), mk(3.0)};
    classify_stability(v);
    CHECK(v[0].stable == Stability::unknown);
    CHECK(v[1].stable == Stability::unknown);
    std::vector<SteadyStateBranch> w{mk(1.0), mk(2.0)};
    classify_stability(w);
    CHECK(w[0].stable == Stability::unknown);
    CHECK(w[1].stable == Stability::unknown);
  }
}

TEST_CASE("P-sweep continuity away from folds") {
  const SteadyStateParams p = bare_params(0.2, 1.0);
  const double d0 = 2.0;
  double prev_low = -1;
  int prev_count = 0;
  for (int i = 1; i <= 300; ++i) {
    const double eps = std::sqrt(4.0 * i / 300.0);
    const auto r = rwa_branches(p, 1, d0, eps);
    const int count = static_cast<int>(r.branches.size());
    if (prev_low >= 0 && count == prev_count) {
      // lowest branch moves continuously between neighboring drives
      CHECK(std::abs(r.branches[0].I1 - prev_low) <=
            0.2 * std::max(prev_low, 0.05));
    }
    prev_low = r.branches[0].I1;
    prev_count = count;
  }
}
