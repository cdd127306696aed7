#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bohmex {

using cplx = std::complex<double>;

// Uniform 1D grid, endpoints inclusive: dx = (x_max - x_min) / (n - 1).
struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;

    Grid1D() = default;
    Grid1D(double lo, double hi, int n_points);

    double dx() const { return (x_max - x_min) / (n - 1); }
    double x(int i) const { return x_min + i * dx(); }
    bool same_as(const Grid1D& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n;
    }
};

// Complex amplitudes on a Grid1D plus a clock.
struct WaveField1D {
    Grid1D grid;
    std::vector<cplx> amp;
    double time = 0.0;

    WaveField1D() = default;
    explicit WaveField1D(const Grid1D& g) : grid(g), amp(g.n, cplx(0.0, 0.0)) {}

    double norm() const;         // trapezoid sum of |psi|^2 dx
    double max_abs() const;
    void normalize();            // scale to unit norm
    bool finite() const;
};

// Complex amplitudes on a tensor grid, row-major: amp[i1 * grid_x2.n + i2].
struct WaveField2D {
    Grid1D grid_x1;
    Grid1D grid_x2;
    std::vector<cplx> amp;
    double time = 0.0;

    WaveField2D() = default;
    WaveField2D(const Grid1D& g1, const Grid1D& g2)
        : grid_x1(g1), grid_x2(g2), amp(static_cast<size_t>(g1.n) * g2.n) {}

    cplx& at(int i1, int i2) { return amp[static_cast<size_t>(i1) * grid_x2.n + i2]; }
    const cplx& at(int i1, int i2) const {
        return amp[static_cast<size_t>(i1) * grid_x2.n + i2];
    }

    double norm() const;         // 2D trapezoid
    double max_abs() const;
    void normalize();
    bool finite() const;
};

} // namespace bohmex
