#include "core/observables.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace bohmex {

namespace {

void require_normalized(double n, const char* who) {
    if (std::abs(n - 1.0) > 1e-6)
        throw NotNormalized(std::string(who) + ": norm is " + std::to_string(n));
}

double trapz_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

} // namespace

void apply_kinetic_1d(const Grid1D& g, const cplx* in, cplx* out, const UnitSystem& u,
                      PropagatorConfig::Kinetic scheme) {
    const int n = g.n;
    const double dx2 = g.dx() * g.dx();
    const double pref = -0.5 * u.hbar2_over_m() / dx2;
    std::vector<cplx> k(n);
    k[0] = cplx(0, 0);
    k[n - 1] = cplx(0, 0);
    for (int i = 1; i < n - 1; ++i)
        k[i] = pref * (in[i - 1] - 2.0 * in[i] + in[i + 1]);
    if (scheme == PropagatorConfig::Kinetic::Fd3) {
        for (int i = 0; i < n; ++i) out[i] = k[i];
        return;
    }
    // compact stencil: solve M out = K in with M = tridiag(1, 10, 1)/12
    const double off = 1.0 / 12.0, diag = 10.0 / 12.0;
    std::vector<double> cp(n, 0.0);
    out[0] = cplx(0, 0);
    for (int i = 1; i < n - 1; ++i) {
        const double denom = diag - off * cp[i - 1];
        cp[i] = off / denom;
        out[i] = (k[i] - off * out[i - 1]) / denom;
    }
    out[n - 1] = cplx(0, 0);
    for (int i = n - 2; i >= 1; --i) out[i] -= cp[i] * out[i + 1];
}

double expectation_position_1d(const WaveField1D& psi) {
    require_normalized(psi.norm(), "expectation_position_1d");
    const int n = psi.grid.n;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += trapz_weight(i, n) * std::norm(psi.amp[i]) * psi.grid.x(i);
    return s * psi.grid.dx();
}

double variance_position_1d(const WaveField1D& psi) {
    const double mean = expectation_position_1d(psi);
    const int n = psi.grid.n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = psi.grid.x(i) - mean;
        s += trapz_weight(i, n) * std::norm(psi.amp[i]) * d * d;
    }
    return s * psi.grid.dx();
}

double expectation_kinetic_1d(const WaveField1D& psi, const UnitSystem& u,
                              PropagatorConfig::Kinetic scheme) {
    require_normalized(psi.norm(), "expectation_kinetic_1d");
    const int n = psi.grid.n;
    std::vector<cplx> t(n);
    apply_kinetic_1d(psi.grid, psi.amp.data(), t.data(), u, scheme);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += trapz_weight(i, n) * (std::conj(psi.amp[i]) * t[i]).real();
    return s * psi.grid.dx();
}

double expectation_potential_1d(const WaveField1D& psi, const Potential1D& v,
                                const PotentialContext& ctx) {
    require_normalized(psi.norm(), "expectation_potential_1d");
    const int n = psi.grid.n;
    std::vector<double> vv(n);
    v.fill(psi.grid, ctx, vv);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += trapz_weight(i, n) * std::norm(psi.amp[i]) * vv[i];
    return s * psi.grid.dx();
}

double expectation_position_2d(const WaveField2D& psi, int axis) {
    require_normalized(psi.norm(), "expectation_position_2d");
    const int n1 = psi.grid_x1.n, n2 = psi.grid_x2.n;
    double s = 0.0;
    for (int i = 0; i < n1; ++i) {
        const cplx* row = psi.amp.data() + static_cast<size_t>(i) * n2;
        for (int j = 0; j < n2; ++j) {
            const double w = trapz_weight(i, n1) * trapz_weight(j, n2);
            const double x = axis == 0 ? psi.grid_x1.x(i) : psi.grid_x2.x(j);
            s += w * std::norm(row[j]) * x;
        }
    }
    return s * psi.grid_x1.dx() * psi.grid_x2.dx();
}

double expectation_kinetic_2d(const WaveField2D& psi, int axis, const UnitSystem& u,
                              PropagatorConfig::Kinetic scheme) {
    require_normalized(psi.norm(), "expectation_kinetic_2d");
    const int n1 = psi.grid_x1.n, n2 = psi.grid_x2.n;
    double s = 0.0;
    if (axis == 1) {
        std::vector<cplx> t(n2);
        for (int i = 0; i < n1; ++i) {
            const cplx* row = psi.amp.data() + static_cast<size_t>(i) * n2;
            apply_kinetic_1d(psi.grid_x2, row, t.data(), u, scheme);
            double r = 0.0;
            for (int j = 0; j < n2; ++j)
                r += trapz_weight(j, n2) * (std::conj(row[j]) * t[j]).real();
            s += trapz_weight(i, n1) * r;
        }
    } else {
        std::vector<cplx> col(n1), t(n1);
        for (int j = 0; j < n2; ++j) {
            for (int i = 0; i < n1; ++i) col[i] = psi.at(i, j);
            apply_kinetic_1d(psi.grid_x1, col.data(), t.data(), u, scheme);
            double r = 0.0;
            for (int i = 0; i < n1; ++i)
                r += trapz_weight(i, n1) * (std::conj(col[i]) * t[i]).real();
            s += trapz_weight(j, n2) * r;
        }
    }
    return s * psi.grid_x1.dx() * psi.grid_x2.dx();
}

double expectation_potential_2d(const WaveField2D& psi, const Potential2D& v) {
    require_normalized(psi.norm(), "expectation_potential_2d");
    const int n1 = psi.grid_x1.n, n2 = psi.grid_x2.n;
    double s = 0.0;
    for (int i = 0; i < n1; ++i) {
        const cplx* row = psi.amp.data() + static_cast<size_t>(i) * n2;
        const double x1 = psi.grid_x1.x(i);
        for (int j = 0; j < n2; ++j) {
            const double w = trapz_weight(i, n1) * trapz_weight(j, n2);
            s += w * std::norm(row[j]) * v.eval(psi.time, x1, psi.grid_x2.x(j));
        }
    }
    return s * psi.grid_x1.dx() * psi.grid_x2.dx();
}

double expectation_hamiltonian_2d(const WaveField2D& psi, const Potential2D& v,
                                  const UnitSystem& u, PropagatorConfig::Kinetic scheme) {
    return expectation_kinetic_2d(psi, 0, u, scheme) +
           expectation_kinetic_2d(psi, 1, u, scheme) + expectation_potential_2d(psi, v);
}

} // namespace bohmex
