#pragma once

// Physical constants in the (eV, nm, fs) unit system used throughout.
// Masses are carried as hbar^2/m [eV nm^2] so that kinetic terms read
// -(hbar^2/2m) d2/dx2 without ever forming the tiny SI mass.

namespace bohmex::constants {

// CODATA inputs
inline constexpr double hbar = 0.6582119569;        // eV fs
inline constexpr double hbar_c = 197.3269804;       // eV nm
inline constexpr double m0_c2 = 510998.95;          // eV (free electron)
inline constexpr double k_boltzmann = 8.617333262e-5; // eV/K
inline constexpr double fine_structure = 7.2973525693e-3;

// Derived, frozen at compile time
inline constexpr double hbar2_over_m0 = (hbar_c * hbar_c) / m0_c2; // eV nm^2
inline constexpr double coulomb_ev_nm = hbar_c * fine_structure;   // e^2/(4 pi eps0), eV nm

inline constexpr double pi = 3.14159265358979323846;

} // namespace bohmex::constants
