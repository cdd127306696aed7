#pragma once

#include <memory>
#include <span>
#include <vector>

#include "core/potential.hpp"
#include "core/units.hpp"

namespace bohmex {

struct BoundaryConfig {
    enum class Kind { Hard, Cap } kind = Kind::Hard;
    double cap_strength = 0.3; // eV, peak of the quadratic absorber
    double cap_width = 50.0;   // nm per side
};

// Crank-Nicolson propagation; the kinetic operator uses a compact
// (Numerov-weighted) three-point stencil by default, which keeps the solves
// tridiagonal while pushing the spatial error to fourth order. Plain
// three-point is available for comparison runs.
struct PropagatorConfig {
    double dt = 0.1; // fs
    BoundaryConfig boundary;
    enum class Kinetic { Compact4, Fd3 } kinetic = Kinetic::Compact4;

    void validate(const Grid1D& g) const;
};

class Propagator1D {
  public:
    Propagator1D(const Grid1D& grid, const UnitSystem& units, const PropagatorConfig& cfg);

    // Advance one dt under the gridded potential; returns max |psi| seen.
    // Scratch is thread-local, so one instance may serve many threads.
    double step(WaveField1D& psi, std::span<const double> v) const;
    double step(WaveField1D& psi, const Potential1D& v, const PotentialContext& ctx) const;

    const Grid1D& grid() const { return grid_; }
    const PropagatorConfig& config() const { return cfg_; }
    std::span<const double> cap_profile() const { return cap_; }

  private:
    Grid1D grid_;
    UnitSystem units_;
    PropagatorConfig cfg_;
    double kappa_;       // hbar^2 / (2 m dx^2)
    double m_off_;       // Numerov off-diagonal mass weight (1/12 or 0)
    double m_diag_;      // Numerov diagonal mass weight (10/12 or 1)
    std::vector<double> cap_; // absorbing profile W(x) >= 0, zero in the interior
};

// One-shot functional form of the same step.
WaveField1D step_1d(const WaveField1D& psi, const Potential1D& v,
                    const PropagatorConfig& cfg, const PotentialContext& ctx,
                    const UnitSystem& units);

class Propagator2D {
  public:
    Propagator2D(const Grid1D& g1, const Grid1D& g2, const UnitSystem& units,
                 const PropagatorConfig& cfg);
    ~Propagator2D();

    void step(WaveField2D& psi, const Potential2D& v);

  private:
    struct Factorization;
    void refresh_potentials(const Potential2D& v, double t);
    cplx vat1(int i, int j) const;
    cplx vat2(int i, int j) const;
    // half-step building blocks; minus applies (I - i theta H_axis),
    // plus solves (I + i theta H_axis)
    void sweep_axis2_minus(WaveField2D& psi);
    void sweep_axis2_plus(WaveField2D& psi);
    void sweep_axis1_minus(WaveField2D& psi);
    void sweep_axis1_plus(WaveField2D& psi);

    Grid1D g1_, g2_;
    UnitSystem units_;
    PropagatorConfig cfg_;
    double kappa1_, kappa2_;
    double m_off_, m_diag_;
    bool have_v_ = false;
    std::vector<double> v1_, v2_;   // axis potentials
    std::vector<double> vc_;        // coupling on the tensor grid (may be empty)
    std::vector<double> cap1_, cap2_;
    bool coupled_ = false;
    std::unique_ptr<Factorization> fact_;
    std::vector<cplx> plane_scratch_;
};

} // namespace bohmex
