#pragma once

#include <vector>

#include "core/manybody.hpp"
#include "core/rng.hpp"

namespace bohmex {

// Draw m positions from |psi|^2 by inverting the cumulative trapezoid of the
// gridded density. Deterministic given the seed. Throws NotNormalized when
// |norm - 1| > 1e-6.
std::vector<double> sample_positions_1d(const WaveField1D& psi, int m, uint64_t seed);

// 2D quantum-equilibrium sampling: marginal in x1 by inverse CDF, then the
// conditional in x2 at the sampled (interpolated) x1 row.
struct Sample2D {
    double x1;
    double x2;
};
std::vector<Sample2D> sample_positions_2d(const WaveField2D& psi, int m, uint64_t seed);

// Metropolis sampling of the symmetrized N-particle density built from
// packets (N >= 2 supported, intended for N > 2 where inverse CDF is out of
// reach). One independent walker per requested sample, fixed burn-in.
std::vector<std::vector<double>> sample_symmetrized_metropolis(
    const std::vector<GaussianPacketSpec>& packets, Species species, int m,
    uint64_t seed, int burn_in = 1000);

} // namespace bohmex
