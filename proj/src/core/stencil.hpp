#pragma once

#include <algorithm>
#include <cmath>

#include "core/grid.hpp"

namespace bohmex {

// Six-point Lagrange interpolation on a uniform grid: value, first and second
// derivative at an off-grid point. Weights are computed once per point and
// reused across the many fields sharing one grid.
struct LagrangeStencil {
    int i0 = 0;
    double w[6];
    double dw[6];  // already divided by dx
    double d2w[6]; // already divided by dx^2

    static LagrangeStencil at(const Grid1D& g, double x) {
        LagrangeStencil s;
        const double dx = g.dx();
        double u = (x - g.x_min) / dx;
        u = std::min(std::max(u, 0.0), static_cast<double>(g.n - 1));
        s.i0 = std::min(std::max(static_cast<int>(u) - 2, 0), g.n - 6);
        const double xi = u - s.i0;
        for (int j = 0; j < 6; ++j) {
            double p = 1.0, dp = 0.0, d2p = 0.0, denom = 1.0;
            for (int k = 0; k < 6; ++k) {
                if (k == j) continue;
                const double t = xi - k;
                d2p = d2p * t + 2.0 * dp;
                dp = dp * t + p;
                p *= t;
                denom *= (j - k);
            }
            s.w[j] = p / denom;
            s.dw[j] = dp / (denom * dx);
            s.d2w[j] = d2p / (denom * dx * dx);
        }
        return s;
    }

    cplx value(const cplx* amp) const {
        cplx v(0, 0);
        for (int j = 0; j < 6; ++j) v += w[j] * amp[i0 + j];
        return v;
    }
    cplx deriv(const cplx* amp) const {
        cplx v(0, 0);
        for (int j = 0; j < 6; ++j) v += dw[j] * amp[i0 + j];
        return v;
    }
    void value_and_deriv(const cplx* amp, cplx& v, cplx& d) const {
        v = cplx(0, 0);
        d = cplx(0, 0);
        for (int j = 0; j < 6; ++j) {
            v += w[j] * amp[i0 + j];
            d += dw[j] * amp[i0 + j];
        }
    }
    // second derivative of the modulus; meaningless inside node regions
    double modulus_deriv2(const cplx* amp) const {
        double v = 0.0;
        for (int j = 0; j < 6; ++j) v += d2w[j] * std::abs(amp[i0 + j]);
        return v;
    }
    double modulus(const cplx* amp) const {
        double v = 0.0;
        for (int j = 0; j < 6; ++j) v += w[j] * std::abs(amp[i0 + j]);
        return v;
    }
};

} // namespace bohmex
