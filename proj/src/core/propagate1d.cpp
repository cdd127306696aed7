#include "core/propagate.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace bohmex {

void PropagatorConfig::validate(const Grid1D& g) const {
    if (dt == 0.0) throw Error("PropagatorConfig: dt must be nonzero");
    if (boundary.kind == BoundaryConfig::Kind::Cap) {
        if (boundary.cap_width < 10.0 * g.dx())
            throw Error("PropagatorConfig: CAP width must span at least 10 dx");
        if (boundary.cap_strength <= 0.0)
            throw Error("PropagatorConfig: CAP strength must be positive");
    }
}

namespace {

std::vector<double> make_cap_profile(const Grid1D& g, const BoundaryConfig& b) {
    std::vector<double> w(g.n, 0.0);
    if (b.kind != BoundaryConfig::Kind::Cap) return w;
    for (int i = 0; i < g.n; ++i) {
        const double dl = g.x(i) - g.x_min;
        const double dr = g.x_max - g.x(i);
        const double d = std::min(dl, dr);
        if (d < b.cap_width) {
            const double s = (b.cap_width - d) / b.cap_width;
            w[i] = b.cap_strength * s * s;
        }
    }
    return w;
}

} // namespace

Propagator1D::Propagator1D(const Grid1D& grid, const UnitSystem& units,
                           const PropagatorConfig& cfg)
    : grid_(grid), units_(units), cfg_(cfg) {
    cfg_.validate(grid_);
    const double dx = grid_.dx();
    kappa_ = 0.5 * units_.hbar2_over_m() / (dx * dx);
    const bool compact = cfg_.kinetic == PropagatorConfig::Kinetic::Compact4;
    m_off_ = compact ? 1.0 / 12.0 : 0.0;
    m_diag_ = compact ? 10.0 / 12.0 : 1.0;
    cap_ = make_cap_profile(grid_, cfg_.boundary);
}

namespace {
struct StepScratch {
    std::vector<double> v;
    std::vector<cplx> rhs, cp, out;
};
thread_local StepScratch g_step;
} // namespace

double Propagator1D::step(WaveField1D& psi, const Potential1D& v,
                          const PotentialContext& ctx) const {
    if (static_cast<int>(g_step.v.size()) < grid_.n) g_step.v.resize(grid_.n);
    v.fill(grid_, ctx, std::span<double>(g_step.v.data(), grid_.n));
    return step(psi, std::span<const double>(g_step.v.data(), grid_.n));
}

double Propagator1D::step(WaveField1D& psi, std::span<const double> v) const {
    const int n = grid_.n;
    if (static_cast<int>(psi.amp.size()) != n || static_cast<int>(v.size()) != n)
        throw Error("Propagator1D: grid size mismatch");

    const double theta = 0.5 * cfg_.dt / units_.hbar;
    const cplx itheta(0.0, theta);
    auto vat = [&](int i) { return cplx(v[i], -cap_[i]); };

    // Crank-Nicolson with the compact mass matrix M:
    //   (M + i theta Ht) psi^{n+1} = (M - i theta Ht) psi^n,
    //   Ht = -(hbar^2/2m) K + M diag(V)
    if (static_cast<int>(g_step.rhs.size()) < n) {
        g_step.rhs.resize(n);
        g_step.cp.resize(n);
    }
    if (static_cast<int>(g_step.out.size()) != n) g_step.out.resize(n);
    std::vector<cplx>& rhs = g_step.rhs;
    std::vector<cplx>& cp = g_step.cp;
    std::vector<cplx>& out = g_step.out;

    rhs[0] = cplx(0.0, 0.0);
    rhs[n - 1] = cplx(0.0, 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const cplx lo = m_off_ - itheta * (-kappa_ + m_off_ * vat(i - 1));
        const cplx di = m_diag_ - itheta * (2.0 * kappa_ + m_diag_ * vat(i));
        const cplx up = m_off_ - itheta * (-kappa_ + m_off_ * vat(i + 1));
        rhs[i] = lo * psi.amp[i - 1] + di * psi.amp[i] + up * psi.amp[i + 1];
    }

    // Thomas solve of the + system; boundary rows pinned to zero (Dirichlet)
    cp[0] = cplx(0.0, 0.0);
    out[0] = cplx(0.0, 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const cplx lo = m_off_ + itheta * (-kappa_ + m_off_ * vat(i - 1));
        const cplx di = m_diag_ + itheta * (2.0 * kappa_ + m_diag_ * vat(i));
        const cplx up = m_off_ + itheta * (-kappa_ + m_off_ * vat(i + 1));
        const cplx denom = di - lo * cp[i - 1];
        cp[i] = up / denom;
        out[i] = (rhs[i] - lo * out[i - 1]) / denom;
    }
    out[n - 1] = cplx(0.0, 0.0);
    double max2 = 0.0;
    double sum2 = 0.0;
    for (int i = n - 2; i >= 1; --i) {
        out[i] -= cp[i] * out[i + 1];
        const double a2 = std::norm(out[i]);
        if (a2 > max2) max2 = a2;
        sum2 += a2;
    }
    if (!std::isfinite(sum2))
        throw NonFiniteAmplitude("1D step produced NaN/Inf (dt or dx mismatched to the "
                                 "potential scale)");
    psi.amp.swap(out);
    psi.time += cfg_.dt;
    return std::sqrt(max2);
}

WaveField1D step_1d(const WaveField1D& psi, const Potential1D& v,
                    const PropagatorConfig& cfg, const PotentialContext& ctx,
                    const UnitSystem& units) {
    Propagator1D prop(psi.grid, units, cfg);
    WaveField1D out = psi;
    prop.step(out, v, ctx);
    return out;
}

} // namespace bohmex
