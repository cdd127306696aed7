#include "core/propagate.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace bohmex {

namespace {

std::vector<double> cap_profile_of(const Grid1D& g, const BoundaryConfig& b) {
    std::vector<double> w(g.n, 0.0);
    if (b.kind != BoundaryConfig::Kind::Cap) return w;
    for (int i = 0; i < g.n; ++i) {
        const double d = std::min(g.x(i) - g.x_min, g.x_max - g.x(i));
        if (d < b.cap_width) {
            const double s = (b.cap_width - d) / b.cap_width;
            w[i] = b.cap_strength * s * s;
        }
    }
    return w;
}

thread_local std::vector<cplx> g_row_y;
thread_local std::vector<cplx> g_row_w; // -i th (-kappa + m_off V) per point
thread_local std::vector<cplx> g_row_d; // -i th (2 kappa + m_diag V) per point

} // namespace

// Peaceman-Rachford alternating-direction stepping,
//   (I + i th H1) u* = (I - i th H2) psi,  (I + i th H2) psi' = (I - i th H1) u*,
// with the compact mass matrix per axis. Separable axis potentials live
// entirely in their own sweep and the coupling term is split half/half, so a
// separable Hamiltonian factors exactly into two 1D Crank-Nicolson runs.
//
// The Thomas factorization of each implicit sweep depends only on the
// potential, so for time-independent potentials the forward-elimination
// coefficients (cp) and reciprocal pivots (invd) are built once; the per-step
// sweeps are then division-free.
struct Propagator2D::Factorization {
    std::vector<cplx> cp1, invd1; // axis-1 solve, plane layout [i * n2 + j]
    std::vector<cplx> cp2, invd2; // axis-2 solve, plane layout [i * n2 + j]
};

Propagator2D::Propagator2D(const Grid1D& g1, const Grid1D& g2, const UnitSystem& units,
                           const PropagatorConfig& cfg)
    : g1_(g1), g2_(g2), units_(units), cfg_(cfg) {
    cfg_.validate(g1_);
    cfg_.validate(g2_);
    kappa1_ = 0.5 * units_.hbar2_over_m() / (g1_.dx() * g1_.dx());
    kappa2_ = 0.5 * units_.hbar2_over_m() / (g2_.dx() * g2_.dx());
    const bool compact = cfg_.kinetic == PropagatorConfig::Kinetic::Compact4;
    m_off_ = compact ? 1.0 / 12.0 : 0.0;
    m_diag_ = compact ? 10.0 / 12.0 : 1.0;
    cap1_ = cap_profile_of(g1_, cfg_.boundary);
    cap2_ = cap_profile_of(g2_, cfg_.boundary);
    v1_.resize(g1_.n);
    v2_.resize(g2_.n);
    fact_ = std::make_unique<Factorization>();
}

Propagator2D::~Propagator2D() = default;

cplx Propagator2D::vat1(int i, int j) const {
    const double c = coupled_ ? 0.5 * vc_[static_cast<size_t>(i) * g2_.n + j] : 0.0;
    return cplx(v1_[i] + c, -cap1_[i]);
}

cplx Propagator2D::vat2(int i, int j) const {
    const double c = coupled_ ? 0.5 * vc_[static_cast<size_t>(i) * g2_.n + j] : 0.0;
    return cplx(v2_[j] + c, -cap2_[j]);
}

void Propagator2D::refresh_potentials(const Potential2D& v, double t) {
    if (have_v_ && !v.time_dependent()) return;
    v.axis1(t, g1_, v1_);
    v.axis2(t, g2_, v2_);
    coupled_ = v.has_coupling();
    if (coupled_) {
        vc_.assign(static_cast<size_t>(g1_.n) * g2_.n, 0.0);
        v.coupling(t, g1_, g2_, vc_);
    } else {
        vc_.clear();
    }
    have_v_ = true;

    const int n1 = g1_.n, n2 = g2_.n;
    const size_t plane = static_cast<size_t>(n1) * n2;
    const cplx itheta(0.0, 0.5 * cfg_.dt / units_.hbar);

    fact_->cp1.assign(plane, cplx(0, 0));
    fact_->invd1.assign(plane, cplx(0, 0));
    fact_->cp2.assign(plane, cplx(0, 0));
    fact_->invd2.assign(plane, cplx(0, 0));

    // axis-1 factorization, lockstep down the rows
    parallel_for(n2, [&](long j) {
        cplx prev_cp(0, 0);
        for (int i = 1; i < n1 - 1; ++i) {
            const cplx lo = m_off_ + itheta * (-kappa1_ + m_off_ * vat1(i - 1, j));
            const cplx di = m_diag_ + itheta * (2.0 * kappa1_ + m_diag_ * vat1(i, j));
            const cplx up = m_off_ + itheta * (-kappa1_ + m_off_ * vat1(i + 1, j));
            const cplx denom = di - lo * prev_cp;
            const cplx invd = 1.0 / denom;
            prev_cp = up * invd;
            fact_->cp1[static_cast<size_t>(i) * n2 + j] = prev_cp;
            fact_->invd1[static_cast<size_t>(i) * n2 + j] = invd;
        }
    }, 32);
    // axis-2 factorization, per row
    parallel_for(n1, [&](long i) {
        if (i == 0 || i == n1 - 1) return;
        cplx prev_cp(0, 0);
        for (int j = 1; j < n2 - 1; ++j) {
            const cplx lo = m_off_ + itheta * (-kappa2_ + m_off_ * vat2(i, j - 1));
            const cplx di = m_diag_ + itheta * (2.0 * kappa2_ + m_diag_ * vat2(i, j));
            const cplx up = m_off_ + itheta * (-kappa2_ + m_off_ * vat2(i, j + 1));
            const cplx denom = di - lo * prev_cp;
            const cplx invd = 1.0 / denom;
            prev_cp = up * invd;
            fact_->cp2[static_cast<size_t>(i) * n2 + j] = prev_cp;
            fact_->invd2[static_cast<size_t>(i) * n2 + j] = invd;
        }
    }, 8);
}

// ---- axis 2: rows are contiguous, each row an independent tridiagonal ----

void Propagator2D::sweep_axis2_minus(WaveField2D& psi) {
    const int n1 = g1_.n, n2 = g2_.n;
    const cplx itheta(0.0, 0.5 * cfg_.dt / units_.hbar);
    parallel_for(n1, [&](long i) {
        cplx* row = psi.amp.data() + static_cast<size_t>(i) * n2;
        if (i == 0 || i == n1 - 1) {
            for (int j = 0; j < n2; ++j) row[j] = cplx(0, 0);
            return;
        }
        if (static_cast<int>(g_row_y.size()) < n2) {
            g_row_y.resize(n2);
            g_row_w.resize(n2);
            g_row_d.resize(n2);
        }
        cplx* y = g_row_y.data();
        cplx* w = g_row_w.data();
        cplx* d = g_row_d.data();
        for (int j = 0; j < n2; ++j) {
            const cplx v = vat2(i, j);
            w[j] = -itheta * (-kappa2_ + m_off_ * v);
            d[j] = m_diag_ - itheta * (2.0 * kappa2_ + m_diag_ * v);
        }
        y[0] = cplx(0, 0);
        y[n2 - 1] = cplx(0, 0);
        for (int j = 1; j < n2 - 1; ++j)
            y[j] = (m_off_ + w[j - 1]) * row[j - 1] + d[j] * row[j] +
                   (m_off_ + w[j + 1]) * row[j + 1];
        if (m_off_ == 0.0) {
            for (int j = 0; j < n2; ++j) row[j] = y[j];
            return;
        }
        // solve M2 row = y (constant real tridiagonal, Dirichlet ends)
        row[0] = cplx(0, 0);
        double cpm_prev = 0.0;
        thread_local std::vector<double> cpm;
        if (static_cast<int>(cpm.size()) < n2) cpm.resize(n2);
        for (int j = 1; j < n2 - 1; ++j) {
            const double denom = m_diag_ - m_off_ * cpm_prev;
            cpm_prev = m_off_ / denom;
            cpm[j] = cpm_prev;
            row[j] = (y[j] - m_off_ * row[j - 1]) / denom;
        }
        row[n2 - 1] = cplx(0, 0);
        for (int j = n2 - 2; j >= 1; --j) row[j] -= cpm[j] * row[j + 1];
    }, 8);
}

void Propagator2D::sweep_axis2_plus(WaveField2D& psi) {
    const int n1 = g1_.n, n2 = g2_.n;
    const cplx itheta(0.0, 0.5 * cfg_.dt / units_.hbar);
    parallel_for(n1, [&](long i) {
        cplx* row = psi.amp.data() + static_cast<size_t>(i) * n2;
        if (i == 0 || i == n1 - 1) {
            for (int j = 0; j < n2; ++j) row[j] = cplx(0, 0);
            return;
        }
        if (static_cast<int>(g_row_y.size()) < n2) {
            g_row_y.resize(n2);
            g_row_w.resize(n2);
            g_row_d.resize(n2);
        }
        cplx* y = g_row_y.data();
        // y = M2 row
        y[0] = cplx(0, 0);
        y[n2 - 1] = cplx(0, 0);
        if (m_off_ == 0.0) {
            for (int j = 1; j < n2 - 1; ++j) y[j] = row[j];
        } else {
            for (int j = 1; j < n2 - 1; ++j)
                y[j] = m_off_ * row[j - 1] + m_diag_ * row[j] + m_off_ * row[j + 1];
        }
        // solve with the prebuilt factorization
        const cplx* cp = fact_->cp2.data() + static_cast<size_t>(i) * n2;
        const cplx* invd = fact_->invd2.data() + static_cast<size_t>(i) * n2;
        cplx* w = g_row_w.data();
        for (int j = 0; j < n2 - 1; ++j)
            w[j] = m_off_ + itheta * (-kappa2_ + m_off_ * vat2(i, j));
        row[0] = cplx(0, 0);
        for (int j = 1; j < n2 - 1; ++j)
            row[j] = (y[j] - w[j - 1] * row[j - 1]) * invd[j];
        row[n2 - 1] = cplx(0, 0);
        for (int j = n2 - 2; j >= 1; --j) row[j] -= cp[j] * row[j + 1];
    }, 8);
}

// ---- axis 1: strided direction, processed in lockstep across columns ----

void Propagator2D::sweep_axis1_minus(WaveField2D& psi) {
    const int n1 = g1_.n, n2 = g2_.n;
    const cplx itheta(0.0, 0.5 * cfg_.dt / units_.hbar);
    if (plane_scratch_.size() < psi.amp.size()) plane_scratch_.resize(psi.amp.size());
    cplx* y = plane_scratch_.data();

    const int blocks = std::max(1, thread_count());
    const int bw = (n2 + blocks - 1) / blocks;
    parallel_for(blocks, [&](long b) {
        const int j0 = static_cast<int>(b) * bw;
        const int j1 = std::min(n2, j0 + bw);
        if (j0 >= j1) return;
        for (int j = j0; j < j1; ++j) {
            y[j] = cplx(0, 0);
            y[static_cast<size_t>(n1 - 1) * n2 + j] = cplx(0, 0);
        }
        const int bwj = j1 - j0;
        std::vector<cplx> wm(bwj), wc(bwj), wp(bwj);
        auto fill_w = [&](int i, std::vector<cplx>& out) {
            for (int j = j0; j < j1; ++j)
                out[j - j0] = -itheta * (-kappa1_ + m_off_ * vat1(i, j));
        };
        fill_w(0, wm);
        fill_w(1, wc);
        for (int i = 1; i < n1 - 1; ++i) {
            fill_w(i + 1, wp);
            const cplx* pm = psi.amp.data() + static_cast<size_t>(i - 1) * n2;
            const cplx* pc = pm + n2;
            const cplx* pp = pc + n2;
            cplx* yr = y + static_cast<size_t>(i) * n2;
            for (int j = j0; j < j1; ++j) {
                const cplx di =
                    m_diag_ - itheta * (2.0 * kappa1_ + m_diag_ * vat1(i, j));
                yr[j] = (m_off_ + wm[j - j0]) * pm[j] + di * pc[j] +
                        (m_off_ + wp[j - j0]) * pp[j];
            }
            wm.swap(wc);
            wc.swap(wp);
        }
        // solve M1 psi = y down the rows (constant real coefficients)
        if (m_off_ == 0.0) {
            for (int i = 0; i < n1; ++i) {
                cplx* pr = psi.amp.data() + static_cast<size_t>(i) * n2;
                const cplx* yr = y + static_cast<size_t>(i) * n2;
                for (int j = j0; j < j1; ++j) pr[j] = yr[j];
            }
            return;
        }
        std::vector<double> cpm(n1, 0.0), invm(n1, 0.0);
        for (int i = 1; i < n1 - 1; ++i) {
            const double denom = m_diag_ - m_off_ * cpm[i - 1];
            invm[i] = 1.0 / denom;
            cpm[i] = m_off_ * invm[i];
        }
        for (int j = j0; j < j1; ++j) psi.amp[j] = cplx(0, 0);
        for (int i = 1; i < n1 - 1; ++i) {
            const cplx* prm = psi.amp.data() + static_cast<size_t>(i - 1) * n2;
            cplx* pr = psi.amp.data() + static_cast<size_t>(i) * n2;
            const cplx* yr = y + static_cast<size_t>(i) * n2;
            for (int j = j0; j < j1; ++j) pr[j] = (yr[j] - m_off_ * prm[j]) * invm[i];
        }
        cplx* last = psi.amp.data() + static_cast<size_t>(n1 - 1) * n2;
        for (int j = j0; j < j1; ++j) last[j] = cplx(0, 0);
        for (int i = n1 - 2; i >= 1; --i) {
            cplx* pr = psi.amp.data() + static_cast<size_t>(i) * n2;
            const cplx* prn = pr + n2;
            for (int j = j0; j < j1; ++j) pr[j] -= cpm[i] * prn[j];
        }
    }, 1);
}

void Propagator2D::sweep_axis1_plus(WaveField2D& psi) {
    const int n1 = g1_.n, n2 = g2_.n;
    const cplx itheta(0.0, 0.5 * cfg_.dt / units_.hbar);

    const int blocks = std::max(1, thread_count());
    const int bw = (n2 + blocks - 1) / blocks;
    parallel_for(blocks, [&](long b) {
        const int j0 = static_cast<int>(b) * bw;
        const int j1 = std::min(n2, j0 + bw);
        if (j0 >= j1) return;
        // y = M1 psi lags the in-place forward elimination by one row
        std::vector<cplx> cur_y(j1 - j0), next_y(j1 - j0);
        auto mrow = [&](int i, std::vector<cplx>& out) {
            const cplx* pc = psi.amp.data() + static_cast<size_t>(i) * n2;
            if (i == 0 || i == n1 - 1) {
                for (int j = j0; j < j1; ++j) out[j - j0] = cplx(0, 0);
                return;
            }
            if (m_off_ == 0.0) {
                for (int j = j0; j < j1; ++j) out[j - j0] = pc[j];
                return;
            }
            const cplx* pm = pc - n2;
            const cplx* pp = pc + n2;
            for (int j = j0; j < j1; ++j)
                out[j - j0] = m_off_ * pm[j] + m_diag_ * pc[j] + m_off_ * pp[j];
        };
        mrow(1, cur_y);
        std::vector<cplx> lo_row(j1 - j0);
        auto fill_lo = [&](int i) {
            for (int j = j0; j < j1; ++j)
                lo_row[j - j0] = m_off_ + itheta * (-kappa1_ + m_off_ * vat1(i, j));
        };
        for (int j = j0; j < j1; ++j) psi.amp[j] = cplx(0, 0);
        for (int i = 1; i < n1 - 1; ++i) {
            mrow(i + 1, next_y);
            fill_lo(i - 1);
            const cplx* prm = psi.amp.data() + static_cast<size_t>(i - 1) * n2;
            cplx* pr = psi.amp.data() + static_cast<size_t>(i) * n2;
            const cplx* invd = fact_->invd1.data() + static_cast<size_t>(i) * n2;
            for (int j = j0; j < j1; ++j)
                pr[j] = (cur_y[j - j0] - lo_row[j - j0] * prm[j]) * invd[j];
            cur_y.swap(next_y);
        }
        cplx* last = psi.amp.data() + static_cast<size_t>(n1 - 1) * n2;
        for (int j = j0; j < j1; ++j) last[j] = cplx(0, 0);
        for (int i = n1 - 2; i >= 1; --i) {
            cplx* pr = psi.amp.data() + static_cast<size_t>(i) * n2;
            const cplx* prn = pr + n2;
            const cplx* cp = fact_->cp1.data() + static_cast<size_t>(i) * n2;
            for (int j = j0; j < j1; ++j) pr[j] -= cp[j] * prn[j];
        }
    }, 1);
}

void Propagator2D::step(WaveField2D& psi, const Potential2D& v) {
    if (!psi.grid_x1.same_as(g1_) || !psi.grid_x2.same_as(g2_))
        throw Error("Propagator2D: field grid mismatch");
    refresh_potentials(v, psi.time);

    sweep_axis2_minus(psi);
    sweep_axis1_plus(psi);
    sweep_axis1_minus(psi);
    sweep_axis2_plus(psi);

    psi.time += cfg_.dt;

    double sum2 = 0.0;
    for (size_t i = 0; i < psi.amp.size(); i += 509) sum2 += std::norm(psi.amp[i]);
    if (!std::isfinite(sum2))
        throw NonFiniteAmplitude("2D step produced NaN/Inf amplitudes");
}

} // namespace bohmex
