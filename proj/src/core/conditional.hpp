#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "core/bohm.hpp"
#include "core/cofactor.hpp"
#include "core/packet.hpp"
#include "core/potential.hpp"
#include "core/propagate.hpp"
#include "core/sampling.hpp"

namespace bohmex {

// ---------------------------------------------------------------------------
// The N x N conditional-wave-function machinery. Field (l, a) starts from
// packet l and propagates on potential channel a, i.e. under U_a evaluated at
// the other trajectories. The conditional wave function guiding particle a is
// assembled with determinant (or permanent) cofactors of the per-particle
// trajectory matrix T_a[l][k] = field(l,a)(x_k[t]):
//
//   Psi_a(x) = sum_l field(l,a)(x) * cof(T_a)[l][a].
//
// Keeping every trajectory factor on channel a (rather than on the channel
// matching its coordinate) is what pins Psi_a to zero at the other occupied
// positions for fermions; both choices satisfy the swap symmetry and agree
// whenever the channels coincide. For distinguishable particles the set
// degenerates to the N diagonal fields and no assembly happens.

// quantum-equilibrium initial positions for the symmetrized packet state:
// inverse CDF for N = 1 and 2, Metropolis for larger N
std::vector<std::vector<double>> sample_initial_positions(
    const std::vector<GaussianPacketSpec>& packets, Species species, const Grid1D& grid,
    int m, uint64_t seed);

class ConditionalDynamics {
  public:
    // A context-free potential keeps every channel identical, so the column
    // index is dropped and only N fields are stored (allow_column_collapse
    // exists so tests can force the full N x N representation). Empty sets
    // are legal; transport grows them one injection at a time.
    ConditionalDynamics(std::vector<GaussianPacketSpec> packets, Species species,
                        const Grid1D& grid, const UnitSystem& units,
                        const PropagatorConfig& prop,
                        std::shared_ptr<const Potential1D> potential,
                        std::vector<double> initial_positions,
                        bool allow_column_collapse = true);

    int n() const { return n_; }
    Species species() const { return species_; }
    double time() const { return time_; }
    const Grid1D& grid() const { return grid_; }
    const std::vector<double>& positions() const { return x_; }
    const std::vector<double>& velocities() const { return v_; }
    const std::vector<GaussianPacketSpec>& packets() const { return packets_; }

    // one lockstep iteration: assemble -> advance trajectories (Heun) ->
    // step all fields with the step-start positions
    void step(std::span<const double> cross = {});

    // Bohmian kinetic/quantum energy of particle a at the current instant
    struct ParticleSample {
        double k = 0.0;
        double q = 0.0;
        bool node = false;
    };
    ParticleSample energy_sample(int a) const;
    double potential_energy(std::span<const double> cross = {}) const;

    const WaveField1D& raw_field(int l, int a) const;
    // normalized assembled conditional wave function of particle a
    WaveField1D assemble_conditional(int a) const;
    // T_a[l][k] = field(l,a) at x_k, row-major
    std::vector<cplx> trajectory_matrix(int a) const;
    // assembly coefficients: coef[a*n + l] = cofactor (l, a) of T_a
    std::span<const cplx> assembly_coefficients() const { return coef_; }

    // population changes (open-system transport): the fresh packet fills its
    // whole new row; the new column copies each packet's own-channel history
    void add_particle(const GaussianPacketSpec& packet, double x0);
    void remove_particle(int index);

    bool distinguishable() const { return species_ == Species::Distinguishable; }
    bool column_collapsed() const { return collapsed_; }
    // conserved energy captured at construction; NaN once the population
    // has changed (open systems do not keep a fixed total)
    double total_energy_reference() const;

  private:
    int field_count() const {
        return (distinguishable() || collapsed_) ? n_ : n_ * n_;
    }
    int field_index(int l, int a) const {
        return distinguishable() ? a : (collapsed_ ? l : l * n_ + a);
    }
    void refresh_assembly();
    VelocitySample velocity_sample(int a, double x) const;

    std::vector<GaussianPacketSpec> packets_;
    Species species_;
    Grid1D grid_;
    UnitSystem units_;
    PropagatorConfig prop_cfg_;
    std::shared_ptr<const Potential1D> potential_;
    std::unique_ptr<Propagator1D> prop_;

    int n_ = 0;
    bool collapsed_ = false;
    double time_ = 0.0;
    std::vector<WaveField1D> fields_;   // (l,a) -> l*n+a, or diagonal only
    std::vector<double> field_max_;     // max |psi| per field
    std::vector<double> x_, v_;
    std::vector<cplx> coef_;            // per-particle cofactor columns, n x n
    std::vector<double> scale_;         // assembled-field magnitude scale per particle
    std::vector<double> e_total_;       // per-run conserved energy (t = 0)
    bool e_total_ready_ = false;

    mutable std::vector<double> ctx_buf_;
    mutable std::vector<double> vpot_buf_;
};

// ---------------------------------------------------------------------------
// Step-major ensemble driver for context-free potentials: the N fields are
// shared by every ensemble member (they never hear about trajectories), so M
// members ride on one field propagation.

class SharedFieldEnsemble {
  public:
    SharedFieldEnsemble(std::vector<GaussianPacketSpec> packets, Species species,
                        const Grid1D& grid, const UnitSystem& units,
                        const PropagatorConfig& prop,
                        std::shared_ptr<const Potential1D> potential,
                        std::vector<std::vector<double>> initial_positions);

    int n_particles() const { return n_; }
    int n_members() const { return static_cast<int>(x_.size()); }
    double time() const { return time_; }

    void step();

    std::span<const double> member_positions(int m) const { return x_[m]; }
    std::span<const double> member_velocities(int m) const { return v_[m]; }
    ConditionalDynamics::ParticleSample energy_sample(int m, int a) const;
    double member_e_total(int m) const { return e_total_[m]; }

  private:
    VelocitySample velocity_sample(const std::vector<cplx>& cof,
                                   std::span<const double> scale, int a, double x) const;
    void member_assembly(int m, std::vector<cplx>& cof, std::vector<double>& scale) const;

    Species species_;
    Grid1D grid_;
    UnitSystem units_;
    std::shared_ptr<const Potential1D> potential_;
    std::unique_ptr<Propagator1D> prop_;
    int n_ = 0;
    bool collapsed_ = false;
    double time_ = 0.0;
    std::vector<WaveField1D> fields_; // one per packet, shared by all members
    std::vector<double> field_max_;
    std::vector<std::vector<double>> x_, v_;
    std::vector<double> e_total_;
};

// ---------------------------------------------------------------------------
// Appendix-style swap-symmetry report: evolve from mirrored initial
// conditions and compare the interchanged trajectories.

struct SwapSymmetryReport {
    bool applicable = true; // false for distinguishable species
    bool pass = false;
    double max_rel_deviation = 0.0;
};
SwapSymmetryReport swap_symmetry_check(const std::vector<GaussianPacketSpec>& packets,
                                       Species species, const Grid1D& grid,
                                       const UnitSystem& units,
                                       const PropagatorConfig& prop,
                                       std::shared_ptr<const Potential1D> potential,
                                       std::vector<double> positions, int i, int j,
                                       int n_steps, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Spin-resolved pair of conditional sets. Exchange stays within a channel;
// when coulomb_coupled is set the channels feed each other's potential
// context (the cross span of Potential1D).

class SpinChannelSystem {
  public:
    SpinChannelSystem(std::unique_ptr<ConditionalDynamics> up,
                      std::unique_ptr<ConditionalDynamics> down, bool coulomb_coupled)
        : up_(std::move(up)), down_(std::move(down)), coupled_(coulomb_coupled) {}

    ConditionalDynamics& up() { return *up_; }
    ConditionalDynamics& down() { return *down_; }
    const ConditionalDynamics& up() const { return *up_; }
    const ConditionalDynamics& down() const { return *down_; }
    bool coulomb_coupled() const { return coupled_; }

    void step();

  private:
    std::unique_ptr<ConditionalDynamics> up_, down_;
    bool coupled_;
};

// binary field snapshot: x_min, x_max, n_points, time header then
// interleaved re/im little-endian doubles
void write_field_dump(const std::string& path, const WaveField1D& f);

} // namespace bohmex
