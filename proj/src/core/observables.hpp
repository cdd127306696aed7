#pragma once

#include "core/potential.hpp"
#include "core/propagate.hpp"

namespace bohmex {

// Expectation values by trapezoid quadrature. The kinetic operator uses the
// same discrete stencil as the propagator so that conserved quantities are
// conserved by construction. All ops require |norm - 1| <= 1e-6.

double expectation_position_1d(const WaveField1D& psi);
double variance_position_1d(const WaveField1D& psi);
double expectation_kinetic_1d(const WaveField1D& psi, const UnitSystem& u,
                              PropagatorConfig::Kinetic scheme);
double expectation_potential_1d(const WaveField1D& psi, const Potential1D& v,
                                const PotentialContext& ctx);

double expectation_position_2d(const WaveField2D& psi, int axis);
double expectation_kinetic_2d(const WaveField2D& psi, int axis, const UnitSystem& u,
                              PropagatorConfig::Kinetic scheme);
double expectation_potential_2d(const WaveField2D& psi, const Potential2D& v);
double expectation_hamiltonian_2d(const WaveField2D& psi, const Potential2D& v,
                                  const UnitSystem& u, PropagatorConfig::Kinetic scheme);

// discrete kinetic operator application, shared with the expectation ops
void apply_kinetic_1d(const Grid1D& g, const cplx* in, cplx* out, const UnitSystem& u,
                      PropagatorConfig::Kinetic scheme);

} // namespace bohmex
