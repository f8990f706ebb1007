#include "ramanopt/entanglement.hpp"

#include <cmath>
#include <string>

namespace ramanopt {

LogNegativityResult log_negativity(const Eigen::Matrix4d& V) {
  const double scale = std::max(V.cwiseAbs().maxCoeff(), 1e-300);
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw EntanglementError("covariance matrix must be symmetric");
  for (int i = 0; i < 4; ++i)
    if (!(V(i, i) > 0))
      throw EntanglementError("covariance diagonal must be positive");

  const Eigen::Matrix2d A = V.block<2, 2>(0, 0);
  const Eigen::Matrix2d B = V.block<2, 2>(2, 2);
  const Eigen::Matrix2d C = V.block<2, 2>(0, 2);
  const double sigma = A.determinant() + B.determinant() - 2.0 * C.determinant();
  const double detV = V.determinant();

  double disc = sigma * sigma - 4.0 * detV;
  if (disc < 0) {
    if (disc < -1e-12 * std::max(sigma * sigma, 1.0))
      throw EntanglementError("unphysical covariance: negative discriminant " +
                              std::to_string(disc));
    disc = 0;
  }
  // small root of x^2 - sigma x + detV in the cancellation-free form
  const double denom = sigma + std::sqrt(disc);
  double inner = denom > 0 ? 2.0 * detV / denom : 0.5 * sigma;
  if (inner < 0) {
    if (inner < -1e-12 * std::max(std::abs(sigma), 1.0))
      throw EntanglementError("unphysical covariance: eta_minus^2 < 0");
    inner = 0;
  }

  LogNegativityResult r;
  r.eta_minus = std::sqrt(inner);
  // the discriminant cancellation limits eta_minus to ~1e-13 relative, so
  // log-negativities below that are round-off, not entanglement
  const double arg = 2.0 * r.eta_minus;
  r.E_N = arg >= 1.0 - 1e-12 ? 0.0 : -std::log(arg);

  // bona fide check: the un-transposed symplectic spectrum must be >= 1/2
  const double sigma_p = A.determinant() + B.determinant() + 2.0 * C.determinant();
  const double disc_p = std::max(sigma_p * sigma_p - 4.0 * detV, 0.0);
  const double nu_min_sq = 0.5 * (sigma_p - std::sqrt(disc_p));
  r.bona_fide = nu_min_sq >= 0.25 * (1.0 - 1e-9);
  return r;
}

EntanglementSeries entanglement_series(const CovarianceTrajectory& traj) {
  EntanglementSeries s;
  s.times = traj.times;
  s.E_N.reserve(traj.V.size());
  s.eta_minus.reserve(traj.V.size());
  for (size_t i = 0; i < traj.V.size(); ++i) {
    try {
      const auto r = log_negativity(traj.V[i]);
      s.E_N.push_back(r.E_N);
      s.eta_minus.push_back(r.eta_minus);
    } catch (const EntanglementError& e) {
      throw EntanglementError("sample " + std::to_string(i) + " (t = " +
                              std::to_string(traj.times[i]) + "): " + e.what());
    }
  }

  // death time: first downward zero crossing with no revival afterwards
  const size_t n = s.E_N.size();
  size_t i = 0;
  while (i < n && s.E_N[i] <= 0.0) ++i;  // skip a zero start
  const size_t first_pos = i;
  if (first_pos < n) {
    size_t death = n;
    for (size_t k = first_pos + 1; k < n; ++k) {
      if (s.E_N[k] <= 0.0 && s.E_N[k - 1] > 0.0) {
        if (death == n) death = k;
      } else if (s.E_N[k] > 0.0 && death != n) {
        // revival: record the interval start, reset the death candidate
        size_t end = k;
        while (end < n && s.E_N[end] > 0.0) ++end;
        s.revivals.emplace_back(s.times[k],
                                end < n ? s.times[end] : s.times.back());
        death = n;
        k = end > k ? end - 1 : k;
      }
    }
    if (death < n) s.death_time = s.times[death];
  }
  return s;
}

}  // namespace ramanopt
