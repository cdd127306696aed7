#include "core/grid.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace bohmex {

Grid1D::Grid1D(double lo, double hi, int n_points) : x_min(lo), x_max(hi), n(n_points) {
    if (!(x_max > x_min)) throw Error("Grid1D: x_max must exceed x_min");
    if (n < 16) throw Error("Grid1D: need at least 16 points");
}

namespace {

// trapezoid weights: 1/2 at the ends, 1 inside
double trapz_abs2(const std::vector<cplx>& a, double dx) {
    if (a.empty()) return 0.0;
    double s = 0.5 * (std::norm(a.front()) + std::norm(a.back()));
    for (size_t i = 1; i + 1 < a.size(); ++i) s += std::norm(a[i]);
    return s * dx;
}

} // namespace

double WaveField1D::norm() const { return trapz_abs2(amp, grid.dx()); }

double WaveField1D::max_abs() const {
    double m = 0.0;
    for (const auto& a : amp) m = std::max(m, std::norm(a));
    return std::sqrt(m);
}

void WaveField1D::normalize() {
    double n2 = norm();
    if (n2 <= 0.0) throw Error("WaveField1D: cannot normalize a null field");
    double s = 1.0 / std::sqrt(n2);
    for (auto& a : amp) a *= s;
}

bool WaveField1D::finite() const {
    for (const auto& a : amp)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    return true;
}

double WaveField2D::norm() const {
    const int n1 = grid_x1.n, n2 = grid_x2.n;
    double s = 0.0;
    for (int i = 0; i < n1; ++i) {
        const cplx* row = amp.data() + static_cast<size_t>(i) * n2;
        double r = 0.5 * (std::norm(row[0]) + std::norm(row[n2 - 1]));
        for (int j = 1; j + 1 < n2; ++j) r += std::norm(row[j]);
        s += (i == 0 || i == n1 - 1) ? 0.5 * r : r;
    }
    return s * grid_x1.dx() * grid_x2.dx();
}

double WaveField2D::max_abs() const {
    double m = 0.0;
    for (const auto& a : amp) m = std::max(m, std::norm(a));
    return std::sqrt(m);
}

void WaveField2D::normalize() {
    double n2 = norm();
    if (n2 <= 0.0) throw Error("WaveField2D: cannot normalize a null field");
    double s = 1.0 / std::sqrt(n2);
    for (auto& a : amp) a *= s;
}

bool WaveField2D::finite() const {
    for (const auto& a : amp)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    return true;
}

} // namespace bohmex
