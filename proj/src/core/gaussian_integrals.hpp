#pragma once

#include "core/packet.hpp"

namespace bohmex {

// Closed-form 1D integrals over pairs of Gaussian packets. Everything reduces
// to moments of exp(-alpha x^2 + beta x + gamma) with real alpha > 0 and
// complex beta, gamma.

// <psi_i | psi_j>
cplx gaussian_overlap(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj);

// <psi_i | -(hbar^2/2m) d2/dx2 | psi_j>
cplx gaussian_kinetic(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj,
                      const UnitSystem& u);

// <psi_i | x | psi_j>
cplx gaussian_position(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj);

} // namespace bohmex
