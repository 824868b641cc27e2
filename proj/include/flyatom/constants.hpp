#pragma once

namespace flyatom::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// CODATA 2018, exact.
inline constexpr double boltzmann = 1.380649e-23;  // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// 87Rb atomic mass.
inline constexpr double rb87_mass = 1.4431609e-25;  // kg

}  // namespace flyatom::constants
