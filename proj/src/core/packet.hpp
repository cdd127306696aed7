#pragma once

#include "core/grid.hpp"
#include "core/units.hpp"

namespace bohmex {

// Minimum-uncertainty Gaussian wave packet
//   psi(x) = (pi sigma^2)^(-1/4) exp(i k0 x) exp(-(x - x0)^2 / (2 sigma^2))
// with central energy e0 = (hbar k0)^2 / 2m kept consistent with k0.
struct GaussianPacketSpec {
    double x0 = 0.0;      // nm
    double k0 = 0.0;      // nm^-1 (signed)
    double sigma_x = 0.0; // nm
    double e0 = 0.0;      // eV, derived

    static GaussianPacketSpec from_wavevector(double x0, double k0, double sigma_x,
                                              const UnitSystem& u);
    // k0 magnitude from e0; direction +1 / -1
    static GaussianPacketSpec from_energy(double x0, double e0, int direction,
                                          double sigma_x, const UnitSystem& u);

    cplx eval(double x) const; // closed-form amplitude

    void validate(const UnitSystem& u) const;
};

// Sample the packet on a grid. Requires the grid to extend at least
// 6 sigma beyond x0 on both sides so truncation cannot break normalization.
WaveField1D build_packet(const GaussianPacketSpec& spec, const Grid1D& grid);

} // namespace bohmex
