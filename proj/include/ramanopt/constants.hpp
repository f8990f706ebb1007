#pragma once

namespace ramanopt {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K (exact)
inline constexpr double c_light = 299792458.0;       // m/s (exact)
inline constexpr double two_pi = 6.283185307179586476925286766559;

}  // namespace ramanopt
