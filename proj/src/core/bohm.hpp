#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "core/grid.hpp"
#include "core/stencil.hpp"
#include "core/units.hpp"

namespace bohmex {

// modulus threshold below which the velocity/quantum-potential evaluation is
// flagged as a node region, relative to max|psi|
inline constexpr double node_epsilon_rel = 1e-6;

struct VelocitySample {
    double v = 0.0;
    bool node = false;
};

// v = (hbar/m) Im(psi'/psi) on every grid point; node cells carry a flag.
struct VelocityField {
    std::vector<double> v;
    std::vector<uint8_t> node;
};
VelocityField velocity_field(const WaveField1D& psi, const UnitSystem& u);

// velocity at an off-grid point given precomputed max|psi| for the node test
VelocitySample velocity_at(const WaveField1D& psi, double x, double max_abs,
                           const UnitSystem& u);

// Q = -(hbar^2/2m) R''/R with R = |psi| and a three-point second difference
// around the nearest node. Throws NodeRegion inside nodes; try_ returns empty.
double quantum_potential(const WaveField1D& psi, double x, const UnitSystem& u);
std::optional<double> try_quantum_potential(const WaveField1D& psi, double x,
                                            double max_abs, const UnitSystem& u);

// one Heun step against a frozen velocity field; the velocity is capped at
// dx/dt and the position clamped to the grid (LeftDomain reported via flag)
struct TrajectoryStep {
    double x = 0.0;
    double v = 0.0;
    bool left_domain = false;
    bool node = false;
};
TrajectoryStep advance_trajectory(double x, double dt, const Grid1D& grid,
                                  const std::function<VelocitySample(double)>& v_at);

// two-coordinate samples on a 2D field (configuration-space trajectories)
struct VelocitySample2D {
    double v1 = 0.0, v2 = 0.0;
    bool node = false;
};
VelocitySample2D velocity_at_2d(const WaveField2D& psi, double x1, double x2,
                                double max_abs, const UnitSystem& u);

struct QuantumPotential2D {
    double q1 = 0.0, q2 = 0.0;
    bool node = false;
};
QuantumPotential2D quantum_potential_2d(const WaveField2D& psi, double x1, double x2,
                                        double max_abs, const UnitSystem& u);

// ---------------------------------------------------------------------------
// Ensemble energy bookkeeping: per-trajectory Bohmian kinetic energy
// K = m v^2 / 2 and quantum potential Q accumulated into per-slot means.
// Node-flagged samples take Q from per-trajectory energy conservation
// (Q = E_total - K - V) and are counted.

struct EnergyBreakdown {
    double time = 0.0;
    std::vector<double> k_per_particle;
    std::vector<double> q_per_particle;
    double potential = 0.0;
    double total = 0.0;
};

class EnergyLedger {
  public:
    EnergyLedger() = default;
    EnergyLedger(int n_slots, int n_particles);

    void set_time(int slot, double t);
    // k and q for one particle of one ensemble member
    void add(int slot, int particle, double k, double q, bool node_fallback);
    // configuration potential energy, once per member per slot
    void add_member(int slot, double v_config);

    void merge(const EnergyLedger& other);

    struct Result {
        std::vector<EnergyBreakdown> series;
        std::vector<std::vector<double>> k_se; // [slot][particle] standard error
        std::vector<std::vector<double>> q_se;
        std::vector<double> node_fraction;     // per slot
        long members = 0;
    };
    // requires at least min_members samples per slot (default 100)
    Result finalize(int min_members = 100) const;

    int slots() const { return n_slots_; }
    int particles() const { return n_particles_; }

  private:
    int n_slots_ = 0;
    int n_particles_ = 0;
    std::vector<double> times_;
    std::vector<double> k_sum_, k2_sum_, q_sum_, q2_sum_;
    std::vector<long> node_count_;
    std::vector<double> v_sum_;
    std::vector<long> member_count_;
};

} // namespace bohmex
