#pragma once

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace bohmex {

// Unit system: all lengths in nm, times in fs, energies in eV.
// mass_eff_ratio is m*/m0; 1.0 means free electrons.
struct UnitSystem {
    double hbar = constants::hbar;
    double hbar2_over_m0 = constants::hbar2_over_m0;
    double mass_eff_ratio = 1.0;

    double hbar2_over_m() const { return hbar2_over_m0 / mass_eff_ratio; }
    // m in eV fs^2 / nm^2
    double mass() const { return hbar * hbar / hbar2_over_m(); }
    // group velocity hbar k / m in nm/fs
    double velocity(double k) const { return hbar2_over_m() * k / hbar; }
    // E = (hbar k)^2 / 2m
    double kinetic(double k) const { return 0.5 * hbar2_over_m() * k * k; }
    // k from central energy
    double wavevector(double e) const;

    void validate() const {
        if (hbar <= 0 || hbar2_over_m0 <= 0 || mass_eff_ratio <= 0)
            throw Error("UnitSystem: all scale constants must be positive");
    }
};

} // namespace bohmex
