#pragma once

#include <memory>
#include <span>
#include <vector>

#include "core/grid.hpp"

namespace bohmex {

// Trajectory context a potential may consume: positions of the other
// particles in the same symmetry group, and positions of any further
// particles that interact without exchange (e.g. the opposite spin channel).
struct PotentialContext {
    std::span<const double> own;
    std::span<const double> cross;
    double t = 0.0;
};

class Potential1D {
  public:
    enum class Kind { Free, HarmonicPair, CoulombSoft, LinearRamp, Sum };

    virtual ~Potential1D() = default;
    virtual Kind kind() const = 0;
    virtual double eval(double x, const PotentialContext& ctx) const = 0;
    // true when eval never reads the trajectory context
    virtual bool context_free() const = 0;

    virtual void fill(const Grid1D& g, const PotentialContext& ctx,
                      std::span<double> out) const {
        for (int i = 0; i < g.n; ++i) out[i] = eval(g.x(i), ctx);
    }

    // classical interaction energy of a full configuration, counting each
    // pair once; used for energy bookkeeping, not for propagation
    virtual double configuration_energy(std::span<const double> x,
                                        std::span<const double> cross, double t) const;
};

class FreePotential final : public Potential1D {
  public:
    Kind kind() const override { return Kind::Free; }
    double eval(double, const PotentialContext&) const override { return 0.0; }
    bool context_free() const override { return true; }
    void fill(const Grid1D& g, const PotentialContext&, std::span<double> out) const override {
        for (int i = 0; i < g.n; ++i) out[i] = 0.0;
    }
};

// c sum_b (x - x_b)^2 over the same-group partners, c in eV/nm^2
class HarmonicPairPotential final : public Potential1D {
  public:
    explicit HarmonicPairPotential(double c) : c_(c) {}
    Kind kind() const override { return Kind::HarmonicPair; }
    double eval(double x, const PotentialContext& ctx) const override {
        double v = 0.0;
        for (double xb : ctx.own) v += c_ * (x - xb) * (x - xb);
        return v;
    }
    bool context_free() const override { return false; }
    double configuration_energy(std::span<const double> x, std::span<const double>,
                                double) const override;
    double strength() const { return c_; }

  private:
    double c_;
};

// softened pairwise Coulomb, q^2 / (4 pi eps0 eps_r sqrt(dx^2 + alpha^2));
// sums over own partners and cross-group particles alike
class CoulombSoftPotential final : public Potential1D {
  public:
    CoulombSoftPotential(double alpha, double eps_r);
    Kind kind() const override { return Kind::CoulombSoft; }
    double eval(double x, const PotentialContext& ctx) const override;
    bool context_free() const override { return false; }
    double configuration_energy(std::span<const double> x, std::span<const double> cross,
                                double t) const override;
    double alpha() const { return alpha_; }

  private:
    double alpha_;
    double prefac_; // e^2/(4 pi eps0 eps_r), eV nm
};

// linear bias drop across the active region [0, L]: 0 before, -V after
class LinearRampPotential final : public Potential1D {
  public:
    LinearRampPotential(double bias_ev, double l_active)
        : bias_(bias_ev), l_(l_active) {}
    Kind kind() const override { return Kind::LinearRamp; }
    double eval(double x, const PotentialContext&) const override {
        if (x <= 0.0) return 0.0;
        if (x >= l_) return -bias_;
        return -bias_ * x / l_;
    }
    bool context_free() const override { return true; }

  private:
    double bias_;
    double l_;
};

class SumPotential final : public Potential1D {
  public:
    explicit SumPotential(std::vector<std::shared_ptr<const Potential1D>> parts)
        : parts_(std::move(parts)) {}
    Kind kind() const override { return Kind::Sum; }
    double eval(double x, const PotentialContext& ctx) const override {
        double v = 0.0;
        for (const auto& p : parts_) v += p->eval(x, ctx);
        return v;
    }
    bool context_free() const override {
        for (const auto& p : parts_)
            if (!p->context_free()) return false;
        return true;
    }
    double configuration_energy(std::span<const double> x, std::span<const double> cross,
                                double t) const override {
        double v = 0.0;
        for (const auto& p : parts_) v += p->configuration_energy(x, cross, t);
        return v;
    }

  private:
    std::vector<std::shared_ptr<const Potential1D>> parts_;
};

// 2D potentials are split into separable axis parts plus a genuine coupling
// term; the propagator assigns axis parts to their own sweep so separable
// problems factor exactly into two 1D propagations.
class Potential2D {
  public:
    virtual ~Potential2D() = default;
    virtual void axis1(double t, const Grid1D& g1, std::span<double> v1) const;
    virtual void axis2(double t, const Grid1D& g2, std::span<double> v2) const;
    virtual bool has_coupling() const { return false; }
    virtual void coupling(double t, const Grid1D& g1, const Grid1D& g2,
                          std::span<double> vc) const;
    virtual bool time_dependent() const { return false; }
    // pointwise value, for observables and trajectory energy bookkeeping
    virtual double eval(double t, double x1, double x2) const = 0;
};

class SeparablePotential2D final : public Potential2D {
  public:
    SeparablePotential2D(std::shared_ptr<const Potential1D> v1,
                         std::shared_ptr<const Potential1D> v2)
        : v1_(std::move(v1)), v2_(std::move(v2)) {}
    void axis1(double t, const Grid1D& g1, std::span<double> out) const override;
    void axis2(double t, const Grid1D& g2, std::span<double> out) const override;
    double eval(double t, double x1, double x2) const override {
        PotentialContext none{{}, {}, t};
        return v1_->eval(x1, none) + v2_->eval(x2, none);
    }

  private:
    std::shared_ptr<const Potential1D> v1_, v2_;
};

// c (x1 - x2)^2, the simplest non-separable pair interaction
class HarmonicCoupling2D final : public Potential2D {
  public:
    explicit HarmonicCoupling2D(double c) : c_(c) {}
    bool has_coupling() const override { return true; }
    void coupling(double t, const Grid1D& g1, const Grid1D& g2,
                  std::span<double> vc) const override;
    double eval(double, double x1, double x2) const override {
        return c_ * (x1 - x2) * (x1 - x2);
    }
    double strength() const { return c_; }

  private:
    double c_;
};

} // namespace bohmex
