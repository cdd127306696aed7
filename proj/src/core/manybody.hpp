#pragma once

#include <vector>

#include "core/packet.hpp"

namespace bohmex {

enum class Species { Fermion, Boson, Distinguishable };

inline double permutation_weight(Species s, int parity_sign) {
    return s == Species::Fermion ? static_cast<double>(parity_sign) : 1.0;
}

// Two-particle state on a tensor grid. Distinguishable gives the plain
// product; Fermion/Boson the normalized (anti)symmetrized combination.
// Throws DegenerateState when antisymmetrization annihilates the state.
WaveField2D build_manybody_2d(const GaussianPacketSpec& p1, const GaussianPacketSpec& p2,
                              Species species, const Grid1D& g1, const Grid1D& g2);

// Normalized phase-space distance between two packets of equal width,
// d^2 = (dk)^2/(2 sigma_k^2) + (dx)^2/(2 sigma_x^2) with sigma_k = 1/sigma_x.
double phase_space_distance(const GaussianPacketSpec& p1, const GaussianPacketSpec& p2);

// Ensemble kinetic energy <T> = sum_j <T_j> of the (anti)symmetrized state
// built from the given packets, via the explicit permutation sum over
// analytic overlap / kinetic integrals. N <= 6.
double ensemble_kinetic_energy(const std::vector<GaussianPacketSpec>& packets,
                               Species species, const UnitSystem& u);

// Appendix-style three-particle check with spins (up, down, down):
// exact 12-term |Phi|^2 versus the 4-term spin-factorized approximation,
// both evaluated at the point (x1, x2, x3).
struct SpinNormCheck {
    double exact;
    double approx;
};
SpinNormCheck spin_mixed_norm_check(const GaussianPacketSpec& p1,
                                    const GaussianPacketSpec& p2,
                                    const GaussianPacketSpec& p3,
                                    double x1, double x2, double x3);

// Pointwise value of the N-particle (anti)symmetrized product of packets;
// the N!-term sum, unnormalized. Used for Metropolis sampling and as a
// reference in the separable limit. N <= 8.
cplx symmetrized_value(const std::vector<GaussianPacketSpec>& packets, Species species,
                       const std::vector<double>& x);

} // namespace bohmex
