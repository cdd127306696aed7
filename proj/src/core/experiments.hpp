#pragma once

#include <memory>

#include "core/conditional.hpp"
#include "core/manybody.hpp"
#include "core/observables.hpp"

namespace bohmex {

// Ensemble drivers shared by the CLI scenarios and the acceptance suite.
// Every driver is deterministic given its seed.

struct EnsembleTracks {
    // recorded positions for the first `track_count` members:
    // tracks[member][slot * n_particles + particle]
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> v;
    std::vector<double> times;
};

struct EnsembleResult {
    EnergyLedger::Result energies;
    double min_pair_distance = 0.0;  // min over members/steps of min_{i<j}|xi-xj|
    long diagonal_sign_changes = 0;  // sign flips of (x_i - x_j) summed over pairs
    // per recorded slot: ensemble median of |x_0 - x_1| (two-particle runs)
    std::vector<double> median_pair_distance;
    EnsembleTracks tracks;
};

struct EnsembleSpec {
    std::vector<GaussianPacketSpec> packets;
    Species species = Species::Distinguishable;
    Grid1D grid;
    UnitSystem units;
    PropagatorConfig prop;   // prop.dt is the lockstep dt
    int members = 4000;
    int n_steps = 6000;
    int record_stride = 20;  // energy-ledger slots every this many steps
    int track_count = 0;     // members whose trajectories are kept
    uint64_t seed = 1;
    std::shared_ptr<const Potential1D> potential; // defaults to free
};

// conditional algorithm with context-free potential: N fields shared by all
// members (step-major)
EnsembleResult run_shared_field_ensemble(const EnsembleSpec& spec);

// conditional algorithm with trajectory-coupled potential: every member owns
// its fields (member-major, parallel over members)
EnsembleResult run_conditional_ensemble(const EnsembleSpec& spec);

// exact reference: the symmetrized 2D state propagated by the ADI solver,
// trajectories advected through it (two particles only)
struct Exact2DSpec {
    GaussianPacketSpec p1, p2;
    Species species = Species::Distinguishable;
    Grid1D grid;             // used for both axes
    UnitSystem units;
    PropagatorConfig prop;
    std::shared_ptr<const Potential2D> potential; // defaults to free
    int members = 4000;
    int n_steps = 6000;
    int record_stride = 20;
    int track_count = 0;
    uint64_t seed = 1;
};
EnsembleResult run_exact_2d_ensemble(const Exact2DSpec& spec);

} // namespace bohmex
