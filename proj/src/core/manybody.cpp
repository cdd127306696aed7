#include "core/manybody.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/gaussian_integrals.hpp"
#include "core/permutations.hpp"

namespace bohmex {

WaveField2D build_manybody_2d(const GaussianPacketSpec& p1, const GaussianPacketSpec& p2,
                              Species species, const Grid1D& g1, const Grid1D& g2) {
    // representability check, same rule as build_packet
    (void)build_packet(p1, g1);
    (void)build_packet(p2, g2);
    if (species != Species::Distinguishable) {
        (void)build_packet(p1, g2);
        (void)build_packet(p2, g1);
    }

    WaveField2D f(g1, g2);
    std::vector<cplx> a1(g1.n), a2(g2.n), b1(g1.n), b2(g2.n);
    for (int i = 0; i < g1.n; ++i) {
        a1[i] = p1.eval(g1.x(i));
        b1[i] = p2.eval(g1.x(i));
    }
    for (int j = 0; j < g2.n; ++j) {
        a2[j] = p1.eval(g2.x(j));
        b2[j] = p2.eval(g2.x(j));
    }

    const double sign = species == Species::Fermion ? -1.0 : 1.0;
    for (int i = 0; i < g1.n; ++i) {
        cplx* row = f.amp.data() + static_cast<size_t>(i) * g2.n;
        if (species == Species::Distinguishable) {
            for (int j = 0; j < g2.n; ++j) row[j] = a1[i] * b2[j];
        } else {
            for (int j = 0; j < g2.n; ++j) row[j] = a1[i] * b2[j] + sign * b1[i] * a2[j];
        }
    }

    const double n2 = f.norm();
    if (species == Species::Fermion && n2 < 1e-12)
        throw DegenerateState("antisymmetrized two-packet state has vanishing norm "
                              "(Pauli-forbidden input)");
    f.normalize();
    return f;
}

double phase_space_distance(const GaussianPacketSpec& p1, const GaussianPacketSpec& p2) {
    if (std::abs(p1.sigma_x - p2.sigma_x) > 1e-12 * std::max(p1.sigma_x, p2.sigma_x))
        throw MixedWidths("phase-space distance is defined for equal packet widths");
    const double sx = p1.sigma_x;
    const double sk = 1.0 / sx;
    const double dk = p1.k0 - p2.k0;
    const double dx = p1.x0 - p2.x0;
    return std::sqrt(dk * dk / (2.0 * sk * sk) + dx * dx / (2.0 * sx * sx));
}

double ensemble_kinetic_energy(const std::vector<GaussianPacketSpec>& packets,
                               Species species, const UnitSystem& u) {
    const int n = static_cast<int>(packets.size());
    if (n < 1) throw Error("ensemble_kinetic_energy: need at least one packet");
    if (n > 6)
        throw TooManyParticles("explicit permutation sum limited to N <= 6, got N = " +
                               std::to_string(n));

    std::vector<cplx> S(n * n), K(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            S[i * n + j] = gaussian_overlap(packets[i], packets[j]);
            K[i * n + j] = gaussian_kinetic(packets[i], packets[j], u);
        }

    if (species == Species::Distinguishable) {
        double t = 0.0;
        for (int j = 0; j < n; ++j) t += K[j * n + j].real();
        return t;
    }

    const auto perms = permutations_with_sign(n);
    std::vector<std::vector<int>> inv;
    inv.reserve(perms.size());
    for (const auto& sp : perms) inv.push_back(inverse_permutation(sp.p));

    cplx num(0.0, 0.0), den(0.0, 0.0);
    std::vector<cplx> pre(n + 1), suf(n + 1);
    for (size_t ip = 0; ip < perms.size(); ++ip) {
        for (size_t iq = 0; iq < perms.size(); ++iq) {
            const double w = permutation_weight(species, perms[ip].sign) *
                             permutation_weight(species, perms[iq].sign);
            const auto& pi = inv[ip];
            const auto& qi = inv[iq];
            // prefix/suffix products of overlaps so each coordinate can be
            // swapped for the kinetic integral without divisions
            pre[0] = cplx(1.0, 0.0);
            for (int k = 0; k < n; ++k) pre[k + 1] = pre[k] * S[pi[k] * n + qi[k]];
            suf[n] = cplx(1.0, 0.0);
            for (int k = n - 1; k >= 0; --k) suf[k] = suf[k + 1] * S[pi[k] * n + qi[k]];

            den += w * pre[n];
            for (int a = 0; a < n; ++a)
                num += w * pre[a] * K[pi[a] * n + qi[a]] * suf[a + 1];
        }
    }
    if (std::abs(den) == 0.0)
        throw DegenerateState("symmetrized state has zero norm");
    return (num / den).real();
}

SpinNormCheck spin_mixed_norm_check(const GaussianPacketSpec& p1,
                                    const GaussianPacketSpec& p2,
                                    const GaussianPacketSpec& p3,
                                    double x1, double x2, double x3) {
    const double xs[3] = {x1, x2, x3};
    // prod(a,b,c) = psi1(x_a) psi2(x_b) psi3(x_c), 1-based argument labels
    auto prod = [&](int a, int b, int c) {
        return p1.eval(xs[a - 1]) * p2.eval(xs[b - 1]) * p3.eval(xs[c - 1]);
    };

    auto pair_norm = [&](int a1, int b1, int c1, int a2, int b2, int c2) {
        // | P1 - P2 |^2 expanded into four terms
        const cplx t1 = prod(a1, b1, c1);
        const cplx t2 = prod(a2, b2, c2);
        return (std::conj(t1) * t1 - std::conj(t1) * t2 - std::conj(t2) * t1 +
                std::conj(t2) * t2)
            .real();
    };

    // the spin-up packet psi1 sits at x1, x2 or x3; within each placement the
    // spin-down pair is antisymmetrized over the remaining two arguments.
    // Orthogonal spin factors kill every cross term between placements, which
    // is what reduces 36 products to these twelve.
    const double g1 = pair_norm(1, 2, 3, 1, 3, 2);
    const double g2 = pair_norm(2, 1, 3, 3, 1, 2);
    const double g3 = pair_norm(2, 3, 1, 3, 2, 1);

    SpinNormCheck r;
    r.exact = g1 + g2 + g3;
    r.approx = g1;
    return r;
}

cplx symmetrized_value(const std::vector<GaussianPacketSpec>& packets, Species species,
                       const std::vector<double>& x) {
    const int n = static_cast<int>(packets.size());
    if (static_cast<int>(x.size()) != n)
        throw Error("symmetrized_value: packet/position count mismatch");
    if (n > 8) throw TooManyParticles("symmetrized_value limited to N <= 8");

    if (species == Species::Distinguishable) {
        cplx v(1.0, 0.0);
        for (int j = 0; j < n; ++j) v *= packets[j].eval(x[j]);
        return v;
    }
    static thread_local std::vector<SignedPermutation> cache;
    static thread_local int cache_n = -1;
    if (cache_n != n) {
        cache = permutations_with_sign(n);
        cache_n = n;
    }
    cplx v(0.0, 0.0);
    for (const auto& sp : cache) {
        cplx term(permutation_weight(species, sp.sign), 0.0);
        for (int j = 0; j < n; ++j) term *= packets[j].eval(x[sp.p[j]]);
        v += term;
    }
    return v;
}

} // namespace bohmex
