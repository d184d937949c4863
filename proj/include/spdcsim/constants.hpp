#pragma once

namespace spdcsim {

inline constexpr double c_light     = 299792458.0;       // m/s
inline constexpr double k_boltzmann = 1.380649e-23;      // J/K
inline constexpr double h_planck    = 6.62607015e-34;    // J s
inline constexpr double mu_bohr     = 9.2740100783e-24;  // J/T
inline constexpr double atomic_mass = 1.66053906660e-27; // kg
inline constexpr double pi          = 3.14159265358979323846;
inline constexpr double two_pi      = 2.0 * pi;

} // namespace spdcsim
