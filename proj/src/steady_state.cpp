#include "ramanopt/steady_state.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ramanopt/constants.hpp"

namespace ramanopt {

namespace {
constexpr cplx I{0.0, 1.0};
constexpr double kResidualTol = 1e-10;
constexpr double kDedupTol = 1e-6;
}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    default: return "unknown";
  }
}

SteadyStateParams steady_params(const SystemConfig& cfg) {
  return steady_params(cfg, derive_params(cfg));
}

SteadyStateParams steady_params(const SystemConfig& cfg, const DerivedParams& der) {
  SteadyStateParams p;
  p.gain = compute_xi(cfg.atomic);
  p.kappa1 = cfg.cavity[0].kappa;
  p.kappa2 = cfg.cavity[1].kappa;
  p.beta1 = der.beta[0];
  p.beta2 = der.beta[1];
  p.G1 = der.G[0];
  p.G2 = der.G[1];
  return p;
}

std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0) {
  std::vector<double> roots;
  if (c3 == 0.0) {
    if (c2 == 0.0) {
      if (c1 != 0.0) roots.push_back(-c0 / c1);
      return roots;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0) return roots;
    const double s = std::sqrt(disc);
    // stable quadratic formula
    const double q = -0.5 * (c1 + std::copysign(s, c1));
    roots.push_back(q / c2);
    if (q != 0.0)
      roots.push_back(c0 / q);
    else
      roots.push_back(0.0);
    std::sort(roots.begin(), roots.end());
    return roots;
  }
  // depressed cubic t^3 + p t + q, x = t - b/3
  const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double shift = -b / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    roots.push_back(u + v + shift);
  } else if (disc == 0) {
    const double u = std::cbrt(-q / 2.0);
    roots.push_back(2.0 * u + shift);
    roots.push_back(-u + shift);
  } else {
    const double r = std::sqrt(-p * p * p / 27.0);
    const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
    const double m = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos((phi + two_pi * k) / 3.0) + shift);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

void classify_stability(std::vector<SteadyStateBranch>& branches) {
  const size_t n = branches.size();
  if (n == 1) {
    branches[0].stable = Stability::stable;
    return;
  }
  if (n == 3) {
    // S-curve: the cubic crosses with alternating slope, middle root unstable
    branches[0].stable = Stability::stable;
    branches[1].stable = Stability::unstable;
    branches[2].stable = Stability::stable;
    // degenerate (fold) pairs are not classifiable by position
    auto close = [](double a, double b) {
      return std::abs(a - b) <= kDedupTol * std::max({std::abs(a), std::abs(b), 1e-300});
    };
    if (close(branches[0].I1, branches[1].I1))
      branches[0].stable = branches[1].stable = Stability::unknown;
    if (close(branches[1].I1, branches[2].I1))
      branches[1].stable = branches[2].stable = Stability::unknown;
    return;
  }
  for (auto& br : branches) br.stable = Stability::unknown;
}

SolveResult rwa_branches(const SteadyStateParams& p, int mode_index,
                         double delta0, double epsilon) {
  if (mode_index != 1 && mode_index != 2)
    throw std::invalid_argument("mode_index must be 1 or 2");
  const bool m1 = mode_index == 1;
  const cplx eta = m1 ? -p.gain.eta1 : p.gain.eta2;  // (-1)^j eta_j
  const double kappa = m1 ? p.kappa1 : p.kappa2;
  const double beta = m1 ? p.beta1 : p.beta2;
  const double G = m1 ? p.G1 : p.G2;
  const double x = kappa / 2.0 + eta.real();
  const double y = eta.imag();
  const double dt = delta0 + y;
  const double eps2 = epsilon * epsilon;

  std::vector<double> roots;
  if (beta == 0.0) {
    roots.push_back(eps2 / (dt * dt + x * x));
  } else if (epsilon == 0.0) {
    roots.push_back(0.0);
  } else {
    roots = solve_cubic_real(beta * beta, -2.0 * beta * dt, dt * dt + x * x, -eps2);
  }

  auto f = [&](double In) { const double u = dt - beta * In; return In * (u * u + x * x) - eps2; };
  auto fp = [&](double In) {
    const double u = dt - beta * In;
    return u * u + x * x - 2.0 * beta * In * u;
  };

  SolveResult out;
  const double scale = *std::max_element(roots.begin(), roots.end(),
      [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (double r : roots) {
    for (int it = 0; it < 50; ++it) {  // Newton polish
      const double d = fp(r);
      if (d == 0.0) break;
      const double step = f(r) / d;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::max(std::abs(r), 1.0)) break;
    }
    if (r < -1e-12 * std::max(std::abs(scale), 1.0)) continue;
    r = std::max(r, 0.0);
    SteadyStateBranch br;
    const double In = r;
    const cplx amp = epsilon / (I * (delta0 - beta * In) + kappa / 2.0 + eta);
    const double lhs = In * std::norm(I * (delta0 - beta * In) + kappa / 2.0 + eta);
    br.residual1 = std::abs(lhs - eps2) / std::max({lhs, eps2, 1e-300});
    if (m1) {
      br.I1 = In;
      br.a1_mean = amp;
      br.mirror_shift1 = G > 0 ? -beta * In / G : 0.0;
    } else {
      br.I2 = In;
      br.a2_mean = amp;
      br.mirror_shift2 = G > 0 ? -beta * In / G : 0.0;
    }
    out.branches.push_back(br);
  }
  // dedup (double roots from the solver)
  std::sort(out.branches.begin(), out.branches.end(),
            [&](const SteadyStateBranch& a, const SteadyStateBranch& b) {
              return (m1 ? a.I1 : a.I2) < (m1 ? b.I1 : b.I2);
            });
  auto last = std::unique(out.branches.begin(), out.branches.end(),
      [&](const SteadyStateBranch& a, const SteadyStateBranch& b) {
        const double ia = m1 ? a.I1 : a.I2, ib = m1 ? b.I1 : b.I2;
        return std::abs(ia - ib) <= kDedupTol * std::max({ia, ib, 1e-300});
      });
  out.branches.erase(last, out.branches.end());
  if (out.branches.empty())
    out.diagnostics.push_back("rwa_branches: all cubic roots negative");
  int id = 0;
  for (auto& br : out.branches) br.branch_id = id++;
  classify_stability(out.branches);
  return out;
}

namespace {

// Shared state of one beyond-RWA solve.
struct BrwaSystem {
  const SteadyStateParams& p;
  double delta0, eps, mu;
  cplx C;  // xi12 * conj(xi21)

  cplx alpha1(double I1) const {
    return I * (delta0 - p.beta1 * I1) + p.kappa1 / 2.0 - p.gain.eta1;
  }
  cplx alpha2(double I2) const {
    return -I * (delta0 + p.beta2 * I2) + p.kappa2 / 2.0 + p.gain.eta2;
  }
  cplx det(double I1, double I2) const {
    return alpha1(I1) * std::conj(alpha2(I2)) + C;
  }
  cplx N1(double I2) const { return std::conj(alpha2(I2)) + mu * p.gain.xi12; }
  cplx N2(double I1) const { return mu * std::conj(alpha1(I1)) - p.gain.xi21; }

  // defining relations, as lhs - rhs
  double f1(double I1, double I2) const {
    return I1 * std::norm(det(I1, I2)) - eps * eps * std::norm(N1(I2));
  }
  double f2(double I1, double I2) const {
    return I2 * std::norm(det(I1, I2)) - eps * eps * std::norm(N2(I1));
  }
  double rel_residual1(double I1, double I2) const {
    const double lhs = I1 * std::norm(det(I1, I2));
    const double rhs = eps * eps * std::norm(N1(I2));
    return std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-300});
  }
  double rel_residual2(double I1, double I2) const {
    const double lhs = I2 * std::norm(det(I1, I2));
    const double rhs = eps * eps * std::norm(N2(I1));
    return std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-300});
  }

  bool newton(double& I1, double& I2) const {
    for (int it = 0; it < 80; ++it) {
      const cplx a1 = alpha1(I1), a2c = std::conj(alpha2(I2));
      const cplx dt = a1 * a2c + C;
      const cplx n1 = N1(I2), n2 = N2(I1);
      const double nd = std::norm(dt);
      const cplx dd_dI1 = cplx(0, -p.beta1) * a2c;
      const cplx dd_dI2 = a1 * cplx(0, p.beta2);
      const double dnd_dI1 = 2.0 * std::real(std::conj(dt) * dd_dI1);
      const double dnd_dI2 = 2.0 * std::real(std::conj(dt) * dd_dI2);
      const double e2 = eps * eps;
      const double F1 = I1 * nd - e2 * std::norm(n1);
      const double F2 = I2 * nd - e2 * std::norm(n2);
      const double J11 = nd + I1 * dnd_dI1;
      const double J12 = I1 * dnd_dI2 - e2 * 2.0 * std::real(std::conj(n1) * cplx(0, p.beta2));
      const double J21 = I2 * dnd_dI1 - e2 * 2.0 * std::real(std::conj(n2) * cplx(0, mu * p.beta1));
      const double J22 = nd + I2 * dnd_dI2;
      const double detJ = J11 * J22 - J12 * J21;
      if (detJ == 0.0) return false;
      const double s1 = (F1 * J22 - F2 * J12) / detJ;
      const double s2 = (F2 * J11 - F1 * J21) / detJ;
      I1 = std::max(I1 - s1, 0.0);
      I2 = std::max(I2 - s2, 0.0);
      if (std::abs(s1) <= 1e-15 * std::max(I1, 1e-300) &&
          std::abs(s2) <= 1e-15 * std::max(I2, 1e-300))
        break;
    }
    return rel_residual1(I1, I2) <= kResidualTol && rel_residual2(I1, I2) <= kResidualTol;
  }
};

}  // namespace

SolveResult brwa_mean_fields(const SteadyStateParams& p, double delta0,
                             double epsilon, double mu,
                             std::optional<std::pair<double, double>> seed_guess) {
  if (mu < 0) throw std::invalid_argument("mu must be >= 0");
  for (const cplx& v : {p.gain.xi12, p.gain.xi21, p.gain.eta1, p.gain.eta2})
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("gain coefficients must be finite");

  BrwaSystem sys{p, delta0, epsilon, mu, p.gain.xi12 * std::conj(p.gain.xi21)};
  SolveResult out;

  if (epsilon == 0.0) {
    SteadyStateBranch br;  // undriven: I = 0 is the solution
    out.branches.push_back(br);
  }

  // linear (beta = 0) intensities seed the multi-start grid
  const cplx det0 = sys.alpha1(0) * std::conj(sys.alpha2(0)) + sys.C;
  double I1_lin = 0, I2_lin = 0;
  if (std::abs(det0) > 0) {
    I1_lin = epsilon * epsilon * std::norm(sys.N1(0)) / std::norm(det0);
    I2_lin = epsilon * epsilon * std::norm(sys.N2(0)) / std::norm(det0);
  }

  std::vector<std::pair<double, double>> candidates;
  if (epsilon > 0.0) {
    const double s1[3] = {0.0, I1_lin, 10.0 * I1_lin};
    const double s2[3] = {0.0, I2_lin, 10.0 * I2_lin};
    for (double a : s1)
      for (double b : s2) candidates.emplace_back(a, b);
    if (seed_guess) candidates.push_back(*seed_guess);

    // damped fixed point from every start, then Newton polish
    std::vector<std::pair<double, double>> found;
    int n_failed = 0;
    for (auto [I1, I2] : candidates) {
      bool fp_done = false;
      for (int it = 0; it < 2000; ++it) {
        const double nd = std::norm(sys.det(I1, I2));
        if (nd == 0.0) break;
        const double e2 = epsilon * epsilon;
        const double nI1 = e2 * std::norm(sys.N1(I2)) / nd;
        const double nI2 = e2 * std::norm(sys.N2(I1)) / nd;
        const double p1 = 0.5 * I1 + 0.5 * nI1;
        const double p2 = 0.5 * I2 + 0.5 * nI2;
        const bool small = std::abs(p1 - I1) <= 1e-13 * std::max(p1, 1e-300) &&
                           std::abs(p2 - I2) <= 1e-13 * std::max(p2, 1e-300);
        I1 = p1;
        I2 = p2;
        if (small) {
          fp_done = true;
          break;
        }
      }
      (void)fp_done;
      if (sys.newton(I1, I2))
        found.emplace_back(I1, I2);
      else
        ++n_failed;
    }

    // bracketing backstop: for fixed I1 the second relation is a cubic in
    // I2; scan I1, follow each I2 root and bisect sign changes of f1.
    const double I1_hi = std::max({4.0 * I1_lin,
                                   p.beta1 > 0 ? 2.0 * std::abs(delta0) / p.beta1 : 0.0,
                                   1.0});
    auto roots_I2 = [&](double I1) {
      const cplx z0 = std::conj(sys.alpha2(0));  // conj(alpha2) = z0 + i beta2 I2
      const cplx a1 = sys.alpha1(I1);
      const cplx W0 = a1 * z0 + sys.C;
      const cplx W1 = a1 * cplx(0, p.beta2);
      const double c3 = std::norm(W1);
      const double c2 = 2.0 * std::real(W0 * std::conj(W1));
      const double c1 = std::norm(W0);
      const double c0 = -epsilon * epsilon * std::norm(sys.N2(I1));
      auto rs = solve_cubic_real(c3, c2, c1, c0);
      rs.erase(std::remove_if(rs.begin(), rs.end(), [](double r) { return r < 0; }),
               rs.end());
      return rs;
    };
    const int n_scan = 160;
    std::vector<double> prev_roots;
    double prev_I1 = 0;
    std::vector<double> prev_g;
    for (int k = 0; k <= n_scan; ++k) {
      const double I1 = I1_hi * k / n_scan;
      auto rr = roots_I2(I1);
      std::vector<double> g(rr.size());
      for (size_t i = 0; i < rr.size(); ++i) g[i] = sys.f1(I1, rr[i]);
      if (k > 0 && rr.size() == prev_roots.size()) {
        for (size_t i = 0; i < rr.size(); ++i) {
          if (prev_g[i] == 0.0 || g[i] == 0.0 || (prev_g[i] < 0) == (g[i] < 0))
            continue;
          double lo = prev_I1, hi = I1;
          double i2lo = prev_roots[i], i2hi = rr[i];
          double glo = prev_g[i];
          for (int b = 0; b < 80; ++b) {
            const double mid = 0.5 * (lo + hi);
            auto rm = roots_I2(mid);
            if (rm.empty()) break;
            const double want = 0.5 * (i2lo + i2hi);
            double best = rm[0];
            for (double r : rm)
              if (std::abs(r - want) < std::abs(best - want)) best = r;
            const double gm = sys.f1(mid, best);
            if (gm == 0.0 || (gm < 0) == (glo < 0)) {
              lo = mid;
              i2lo = best;
              glo = gm;
            } else {
              hi = mid;
              i2hi = best;
            }
          }
          double I1c = 0.5 * (lo + hi), I2c = 0.5 * (i2lo + i2hi);
          if (sys.newton(I1c, I2c)) found.emplace_back(I1c, I2c);
        }
      }
      prev_roots = std::move(rr);
      prev_g = std::move(g);
      prev_I1 = I1;
    }

    // dedup
    std::sort(found.begin(), found.end());
    std::vector<std::pair<double, double>> unique_sols;
    for (auto& s : found) {
      bool dup = false;
      for (auto& u : unique_sols) {
        const bool same1 = std::abs(s.first - u.first) <=
                           kDedupTol * std::max({s.first, u.first, 1e-300});
        const bool same2 = std::abs(s.second - u.second) <=
                           kDedupTol * std::max({s.second, u.second, 1e-300});
        if (same1 && same2) {
          dup = true;
          break;
        }
      }
      if (!dup) unique_sols.push_back(s);
    }
    if (unique_sols.empty()) {
      out.diagnostics.push_back(
          "brwa_mean_fields: no start converged (" + std::to_string(n_failed) +
          " fixed-point starts failed)");
      return out;
    }
    for (auto [I1, I2] : unique_sols) {
      SteadyStateBranch br;
      br.I1 = I1;
      br.I2 = I2;
      out.branches.push_back(br);
    }
  }

  for (auto& br : out.branches) {
    const cplx dt = sys.det(br.I1, br.I2);
    br.a1_mean = epsilon * sys.N1(br.I2) / dt;
    br.a2_mean = epsilon * sys.N2(br.I1) / std::conj(dt);
    br.residual1 = sys.rel_residual1(br.I1, br.I2);
    br.residual2 = sys.rel_residual2(br.I1, br.I2);
    br.mirror_shift1 = p.G1 > 0 ? -p.beta1 * br.I1 / p.G1 : 0.0;
    br.mirror_shift2 = p.G2 > 0 ? -p.beta2 * br.I2 / p.G2 : 0.0;
  }
  std::sort(out.branches.begin(), out.branches.end(),
            [](const SteadyStateBranch& a, const SteadyStateBranch& b) {
              return a.I1 < b.I1;
            });
  int id = 0;
  for (auto& br : out.branches) br.branch_id = id++;
  classify_stability(out.branches);
  return out;
}

PhaseDiagram phase_diagram(const SystemConfig& cfg,
                           const std::vector<double>& delta0_grid,
                           const std::vector<double>& P_grid,
                           SteadyModel model, double mu, int jobs) {
  if (delta0_grid.empty() || P_grid.empty())
    throw std::invalid_argument("phase_diagram: grids must be nonempty");
  if (!std::is_sorted(delta0_grid.begin(), delta0_grid.end()) ||
      !std::is_sorted(P_grid.begin(), P_grid.end()))
    throw std::invalid_argument("phase_diagram: grids must be monotone");

  const DerivedParams der = derive_params(cfg);
  const SteadyStateParams sp = steady_params(cfg, der);
  PhaseDiagram pd;
  pd.delta0_grid = delta0_grid;
  pd.P_grid = P_grid;
  const size_t nD = delta0_grid.size(), nP = P_grid.size();
  pd.cells.resize(nD * nP);
  std::vector<std::vector<std::string>> row_diag(nD);

  auto run_row = [&](size_t iD) {
    const double d0 = delta0_grid[iD];
    const double omega_L = cfg.cavity[0].nu - d0;
    std::optional<std::pair<double, double>> seed;
    for (size_t iP = 0; iP < nP; ++iP) {
      const double eps = std::sqrt(cfg.cavity[0].kappa * P_grid[iP] / (hbar * omega_L));
      SolveResult r;
      if (model == SteadyModel::rwa)
        r = rwa_branches(sp, 1, d0, eps);
      else
        r = brwa_mean_fields(sp, d0, eps, mu, seed);
      auto& cell = pd.cells[iD * nP + iP];
      cell.count_joint = static_cast<int>(r.branches.size());
      // multiplicity of the plotted observable I1: coupled-mode backaction
      // splits joint solutions by ~coupling^2 without opening an I1 fold
      int distinct = 0;
      double prev = -1;
      for (const auto& b : r.branches) {
        if (distinct == 0 || b.I1 - prev > 1e-3 * std::max({b.I1, prev, 1e-300}))
          ++distinct;
        prev = b.I1;
      }
      cell.count = distinct;
      if (!r.branches.empty()) {
        cell.I_min = r.branches.front().I1;
        cell.I_max = r.branches.back().I1;
        if (model == SteadyModel::brwa)
          seed = {r.branches.back().I1, r.branches.back().I2};  // continuation
      }
      for (auto& d : r.diagnostics)
        row_diag[iD].push_back("cell(" + std::to_string(iD) + "," +
                               std::to_string(iP) + "): " + d);
    }
  };

  if (jobs <= 1 || nD == 1) {
    for (size_t iD = 0; iD < nD; ++iD) run_row(iD);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    const int nw = std::min<size_t>(jobs, nD);
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&] {
        for (size_t iD = next.fetch_add(1); iD < nD; iD = next.fetch_add(1))
          run_row(iD);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& rd : row_diag)
    pd.diagnostics.insert(pd.diagnostics.end(), rd.begin(), rd.end());
  return pd;
}

}  // namespace ramanopt
