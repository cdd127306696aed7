#include "core/bohm.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace bohmex {

VelocityField velocity_field(const WaveField1D& psi, const UnitSystem& u) {
    const int n = psi.grid.n;
    const double dx = psi.grid.dx();
    const double hbar_over_m = u.hbar2_over_m() / u.hbar;
    const double eps = node_epsilon_rel * psi.max_abs();
    const double eps2 = eps * eps;

    VelocityField f;
    f.v.assign(n, 0.0);
    f.node.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        const double a2 = std::norm(psi.amp[i]);
        if (a2 <= eps2) {
            f.node[i] = 1;
            continue;
        }
        cplx d;
        if (i >= 2 && i < n - 2) {
            // five-point fourth-order first derivative
            d = (psi.amp[i - 2] - 8.0 * psi.amp[i - 1] + 8.0 * psi.amp[i + 1] -
                 psi.amp[i + 2]) /
                (12.0 * dx);
        } else if (i >= 1 && i < n - 1) {
            d = (psi.amp[i + 1] - psi.amp[i - 1]) / (2.0 * dx);
        } else {
            f.node[i] = 1;
            continue;
        }
        f.v[i] = hbar_over_m * (d * std::conj(psi.amp[i])).imag() / a2;
    }
    return f;
}

VelocitySample velocity_at(const WaveField1D& psi, double x, double max_abs,
                           const UnitSystem& u) {
    const auto st = LagrangeStencil::at(psi.grid, x);
    cplx v, d;
    st.value_and_deriv(psi.amp.data(), v, d);
    const double eps = node_epsilon_rel * max_abs;
    const double a2 = std::norm(v);
    const double hbar_over_m = u.hbar2_over_m() / u.hbar;
    if (a2 <= eps * eps) {
        // node region: report the raw value if it exists, flagged; the
        // integrator caps it at dx/dt
        double vv = 0.0;
        if (a2 > 0.0) {
            vv = hbar_over_m * (d * std::conj(v)).imag() / a2;
            if (!std::isfinite(vv)) vv = 0.0;
        }
        return {vv, true};
    }
    return {hbar_over_m * (d * std::conj(v)).imag() / a2, false};
}

std::optional<double> try_quantum_potential(const WaveField1D& psi, double x,
                                            double max_abs, const UnitSystem& u) {
    const double dx = psi.grid.dx();
    int i = static_cast<int>(std::lround((x - psi.grid.x_min) / dx));
    i = std::min(std::max(i, 1), psi.grid.n - 2);
    const double r = std::abs(psi.amp[i]);
    if (r <= node_epsilon_rel * max_abs) return std::nullopt;
    const double rpp = (std::abs(psi.amp[i - 1]) - 2.0 * r + std::abs(psi.amp[i + 1])) /
                       (dx * dx);
    return -0.5 * u.hbar2_over_m() * rpp / r;
}

double quantum_potential(const WaveField1D& psi, double x, const UnitSystem& u) {
    auto q = try_quantum_potential(psi, x, psi.max_abs(), u);
    if (!q) throw NodeRegion("quantum potential evaluated inside a node region");
    return *q;
}

VelocitySample2D velocity_at_2d(const WaveField2D& psi, double x1, double x2,
                                double max_abs, const UnitSystem& u) {
    const auto s1 = LagrangeStencil::at(psi.grid_x1, x1);
    const auto s2 = LagrangeStencil::at(psi.grid_x2, x2);
    const int n2 = psi.grid_x2.n;
    cplx v(0, 0), d1(0, 0), d2(0, 0);
    for (int i = 0; i < 6; ++i) {
        const cplx* row = psi.amp.data() + static_cast<size_t>(s1.i0 + i) * n2 + s2.i0;
        cplx rv(0, 0), rd(0, 0);
        for (int j = 0; j < 6; ++j) {
            rv += s2.w[j] * row[j];
            rd += s2.dw[j] * row[j];
        }
        v += s1.w[i] * rv;
        d1 += s1.dw[i] * rv;
        d2 += s1.w[i] * rd;
    }
    const double hbar_over_m = u.hbar2_over_m() / u.hbar;
    const double a2 = std::norm(v);
    const double eps = node_epsilon_rel * max_abs;
    VelocitySample2D out;
    if (a2 <= eps * eps) {
        out.node = true;
        if (a2 > 0.0) {
            out.v1 = hbar_over_m * (d1 * std::conj(v)).imag() / a2;
            out.v2 = hbar_over_m * (d2 * std::conj(v)).imag() / a2;
            if (!std::isfinite(out.v1)) out.v1 = 0.0;
            if (!std::isfinite(out.v2)) out.v2 = 0.0;
        }
        return out;
    }
    out.v1 = hbar_over_m * (d1 * std::conj(v)).imag() / a2;
    out.v2 = hbar_over_m * (d2 * std::conj(v)).imag() / a2;
    return out;
}

QuantumPotential2D quantum_potential_2d(const WaveField2D& psi, double x1, double x2,
                                        double max_abs, const UnitSystem& u) {
    const double dx1 = psi.grid_x1.dx(), dx2 = psi.grid_x2.dx();
    int i = static_cast<int>(std::lround((x1 - psi.grid_x1.x_min) / dx1));
    int j = static_cast<int>(std::lround((x2 - psi.grid_x2.x_min) / dx2));
    i = std::min(std::max(i, 1), psi.grid_x1.n - 2);
    j = std::min(std::max(j, 1), psi.grid_x2.n - 2);
    const double r = std::abs(psi.at(i, j));
    QuantumPotential2D out;
    if (r <= node_epsilon_rel * max_abs) {
        out.node = true;
        return out;
    }
    const double r1m = std::abs(psi.at(i - 1, j)), r1p = std::abs(psi.at(i + 1, j));
    const double r2m = std::abs(psi.at(i, j - 1)), r2p = std::abs(psi.at(i, j + 1));
    out.q1 = -0.5 * u.hbar2_over_m() * (r1m - 2.0 * r + r1p) / (dx1 * dx1) / r;
    out.q2 = -0.5 * u.hbar2_over_m() * (r2m - 2.0 * r + r2p) / (dx2 * dx2) / r;
    return out;
}

TrajectoryStep advance_trajectory(double x, double dt, const Grid1D& grid,
                                  const std::function<VelocitySample(double)>& v_at) {
    const double v_cap = grid.dx() / dt;
    auto capped = [&](VelocitySample s) {
        if (s.node || std::abs(s.v) > v_cap) {
            s.v = std::min(std::max(s.v, -v_cap), v_cap);
        }
        return s;
    };

    TrajectoryStep out;
    const VelocitySample s0 = capped(v_at(x));
    double x_pred = x + s0.v * dt;
    x_pred = std::min(std::max(x_pred, grid.x_min), grid.x_max);
    const VelocitySample s1 = capped(v_at(x_pred));

    out.v = 0.5 * (s0.v + s1.v);
    out.node = s0.node || s1.node;
    out.x = x + out.v * dt;
    if (out.x < grid.x_min || out.x > grid.x_max) {
        out.left_domain = true;
        out.x = std::min(std::max(out.x, grid.x_min), grid.x_max);
    }
    return out;
}

EnergyLedger::EnergyLedger(int n_slots, int n_particles)
    : n_slots_(n_slots), n_particles_(n_particles) {
    const size_t np = static_cast<size_t>(n_slots) * n_particles;
    times_.assign(n_slots, 0.0);
    k_sum_.assign(np, 0.0);
    k2_sum_.assign(np, 0.0);
    q_sum_.assign(np, 0.0);
    q2_sum_.assign(np, 0.0);
    node_count_.assign(np, 0);
    v_sum_.assign(n_slots, 0.0);
    member_count_.assign(n_slots, 0);
}

void EnergyLedger::set_time(int slot, double t) { times_[slot] = t; }

void EnergyLedger::add(int slot, int particle, double k, double q, bool node_fallback) {
    const size_t idx = static_cast<size_t>(slot) * n_particles_ + particle;
    k_sum_[idx] += k;
    k2_sum_[idx] += k * k;
    q_sum_[idx] += q;
    q2_sum_[idx] += q * q;
    if (node_fallback) ++node_count_[idx];
}

void EnergyLedger::add_member(int slot, double v_config) {
    v_sum_[slot] += v_config;
    ++member_count_[slot];
}

void EnergyLedger::merge(const EnergyLedger& other) {
    if (n_slots_ == 0) {
        *this = other;
        return;
    }
    for (int s = 0; s < n_slots_; ++s) {
        if (other.member_count_[s] > 0) times_[s] = other.times_[s];
        v_sum_[s] += other.v_sum_[s];
        member_count_[s] += other.member_count_[s];
    }
    for (size_t i = 0; i < k_sum_.size(); ++i) {
        k_sum_[i] += other.k_sum_[i];
        k2_sum_[i] += other.k2_sum_[i];
        q_sum_[i] += other.q_sum_[i];
        q2_sum_[i] += other.q2_sum_[i];
        node_count_[i] += other.node_count_[i];
    }
}

EnergyLedger::Result EnergyLedger::finalize(int min_members) const {
    Result r;
    r.members = n_slots_ > 0 ? member_count_[0] : 0;
    if (r.members < min_members)
        throw TooFewSamples("ensemble energies need at least " +
                            std::to_string(min_members) + " members, got " +
                            std::to_string(r.members));
    r.series.resize(n_slots_);
    r.k_se.resize(n_slots_);
    r.q_se.resize(n_slots_);
    r.node_fraction.resize(n_slots_, 0.0);
    for (int s = 0; s < n_slots_; ++s) {
        const long m = member_count_[s];
        EnergyBreakdown& b = r.series[s];
        b.time = times_[s];
        b.k_per_particle.resize(n_particles_);
        b.q_per_particle.resize(n_particles_);
        r.k_se[s].resize(n_particles_);
        r.q_se[s].resize(n_particles_);
        long nodes = 0;
        double total = 0.0;
        for (int p = 0; p < n_particles_; ++p) {
            const size_t idx = static_cast<size_t>(s) * n_particles_ + p;
            const double mk = k_sum_[idx] / m;
            const double mq = q_sum_[idx] / m;
            b.k_per_particle[p] = mk;
            b.q_per_particle[p] = mq;
            const double vk = std::max(0.0, k2_sum_[idx] / m - mk * mk);
            const double vq = std::max(0.0, q2_sum_[idx] / m - mq * mq);
            r.k_se[s][p] = std::sqrt(vk / m);
            r.q_se[s][p] = std::sqrt(vq / m);
            nodes += node_count_[idx];
            total += mk + mq;
        }
        b.potential = v_sum_[s] / m;
        b.total = total + b.potential;
        r.node_fraction[s] =
            static_cast<double>(nodes) / (static_cast<double>(m) * n_particles_);
    }
    return r;
}

} // namespace bohmex
