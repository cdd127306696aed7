#include "core/potential.hpp"

#include <cmath>

#include "core/constants.hpp"

namespace bohmex {

double Potential1D::configuration_energy(std::span<const double> x,
                                         std::span<const double> cross, double t) const {
    // external (context-free) potentials just add up over particles
    PotentialContext none{{}, {}, t};
    double v = 0.0;
    if (context_free()) {
        for (double xi : x) v += eval(xi, none);
        (void)cross;
    }
    return v;
}

double HarmonicPairPotential::configuration_energy(std::span<const double> x,
                                                   std::span<const double>, double) const {
    double v = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = i + 1; j < x.size(); ++j)
            v += c_ * (x[i] - x[j]) * (x[i] - x[j]);
    return v;
}

CoulombSoftPotential::CoulombSoftPotential(double alpha, double eps_r)
    : alpha_(alpha), prefac_(constants::coulomb_ev_nm / eps_r) {}

double CoulombSoftPotential::eval(double x, const PotentialContext& ctx) const {
    double v = 0.0;
    for (double xb : ctx.own) v += prefac_ / std::sqrt((x - xb) * (x - xb) + alpha_ * alpha_);
    for (double xb : ctx.cross)
        v += prefac_ / std::sqrt((x - xb) * (x - xb) + alpha_ * alpha_);
    return v;
}

double CoulombSoftPotential::configuration_energy(std::span<const double> x,
                                                  std::span<const double> cross,
                                                  double) const {
    double v = 0.0;
    auto pair = [&](double a, double b) {
        return prefac_ / std::sqrt((a - b) * (a - b) + alpha_ * alpha_);
    };
    for (size_t i = 0; i < x.size(); ++i) {
        for (size_t j = i + 1; j < x.size(); ++j) v += pair(x[i], x[j]);
        for (double xc : cross) v += pair(x[i], xc);
    }
    return v;
}

void Potential2D::axis1(double, const Grid1D& g1, std::span<double> v1) const {
    for (int i = 0; i < g1.n; ++i) v1[i] = 0.0;
}

void Potential2D::axis2(double, const Grid1D& g2, std::span<double> v2) const {
    for (int j = 0; j < g2.n; ++j) v2[j] = 0.0;
}

void Potential2D::coupling(double, const Grid1D& g1, const Grid1D& g2,
                           std::span<double> vc) const {
    const size_t n = static_cast<size_t>(g1.n) * g2.n;
    for (size_t i = 0; i < n; ++i) vc[i] = 0.0;
}

void SeparablePotential2D::axis1(double t, const Grid1D& g1, std::span<double> out) const {
    PotentialContext none{{}, {}, t};
    v1_->fill(g1, none, out);
}

void SeparablePotential2D::axis2(double t, const Grid1D& g2, std::span<double> out) const {
    PotentialContext none{{}, {}, t};
    v2_->fill(g2, none, out);
}

void HarmonicCoupling2D::coupling(double, const Grid1D& g1, const Grid1D& g2,
                                  std::span<double> vc) const {
    for (int i = 0; i < g1.n; ++i) {
        const double x1 = g1.x(i);
        double* row = vc.data() + static_cast<size_t>(i) * g2.n;
        for (int j = 0; j < g2.n; ++j) {
            const double d = x1 - g2.x(j);
            row[j] = c_ * d * d;
        }
    }
}

} // namespace bohmex
