#include "core/gaussian_integrals.hpp"

#include <cmath>

#include "core/constants.hpp"

namespace bohmex {

namespace {

struct PairExponent {
    double alpha;   // quadratic coefficient, real
    cplx beta;      // linear
    cplx gamma;     // constant (real here, complex kept for generality)
    double prefac;  // product of the two packet normalizations
};

PairExponent combine(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj) {
    const double si2 = pi.sigma_x * pi.sigma_x;
    const double sj2 = pj.sigma_x * pj.sigma_x;
    PairExponent e;
    e.alpha = 0.5 / si2 + 0.5 / sj2;
    e.beta = cplx(pi.x0 / si2 + pj.x0 / sj2, pj.k0 - pi.k0);
    e.gamma = cplx(-pi.x0 * pi.x0 / (2.0 * si2) - pj.x0 * pj.x0 / (2.0 * sj2), 0.0);
    e.prefac = std::pow(constants::pi * si2, -0.25) * std::pow(constants::pi * sj2, -0.25);
    return e;
}

// moments of exp(-alpha x^2 + beta x + gamma): m0, m1 = <x>, m2 = <x^2>
void moments(const PairExponent& e, cplx& m0, cplx& m1, cplx& m2) {
    const cplx b2a = e.beta / (2.0 * e.alpha);
    m0 = std::sqrt(constants::pi / e.alpha) * std::exp(e.beta * b2a * 0.5 + e.gamma);
    m1 = b2a * m0;
    m2 = (b2a * b2a + 0.5 / e.alpha) * m0;
}

} // namespace

cplx gaussian_overlap(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj) {
    const PairExponent e = combine(pi, pj);
    cplx m0, m1, m2;
    moments(e, m0, m1, m2);
    return e.prefac * m0;
}

cplx gaussian_position(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj) {
    const PairExponent e = combine(pi, pj);
    cplx m0, m1, m2;
    moments(e, m0, m1, m2);
    return e.prefac * m1;
}

cplx gaussian_kinetic(const GaussianPacketSpec& pi, const GaussianPacketSpec& pj,
                      const UnitSystem& u) {
    // psi_j'' = [ (i k_j - (x - x_j)/s^2)^2 - 1/s^2 ] psi_j, expanded in powers of x
    const double s2 = pj.sigma_x * pj.sigma_x;
    const double s4 = s2 * s2;
    const cplx c2(1.0 / s4, 0.0);
    const cplx c1(-2.0 * pj.x0 / s4, -2.0 * pj.k0 / s2);
    const cplx c0(-pj.k0 * pj.k0 - 1.0 / s2 + pj.x0 * pj.x0 / s4, 2.0 * pj.k0 * pj.x0 / s2);

    const PairExponent e = combine(pi, pj);
    cplx m0, m1, m2;
    moments(e, m0, m1, m2);
    return -0.5 * u.hbar2_over_m() * e.prefac * (c0 * m0 + c1 * m1 + c2 * m2);
}

} // namespace bohmex
