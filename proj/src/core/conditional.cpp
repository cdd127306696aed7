#include "core/conditional.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "core/errors.hpp"
#include "core/gaussian_integrals.hpp"
#include "core/parallel.hpp"

namespace bohmex {

namespace {

void check_degenerate(const std::vector<GaussianPacketSpec>& packets, Species species) {
    if (species != Species::Fermion || packets.size() < 2) return;
    const int n = static_cast<int>(packets.size());
    std::vector<cplx> s(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s[i * n + j] = gaussian_overlap(packets[i], packets[j]);
    const cplx d = matrix_function(s.data(), n, Species::Fermion);
    if (std::abs(d) < 1e-12)
        throw DegenerateState("fermion packets are (numerically) linearly dependent");
}

double capped(double v, double cap) { return std::min(std::max(v, -cap), cap); }

} // namespace

std::vector<std::vector<double>> sample_initial_positions(
    const std::vector<GaussianPacketSpec>& packets, Species species, const Grid1D& grid,
    int m, uint64_t seed) {
    const int n = static_cast<int>(packets.size());
    if (n == 1) {
        WaveField1D f = build_packet(packets[0], grid);
        f.normalize();
        auto xs = sample_positions_1d(f, m, seed);
        std::vector<std::vector<double>> out(m);
        for (int i = 0; i < m; ++i) out[i] = {xs[i]};
        return out;
    }
    if (n == 2) {
        WaveField2D f = build_manybody_2d(packets[0], packets[1], species, grid, grid);
        auto xs = sample_positions_2d(f, m, seed);
        std::vector<std::vector<double>> out(m);
        for (int i = 0; i < m; ++i) out[i] = {xs[i].x1, xs[i].x2};
        return out;
    }
    return sample_symmetrized_metropolis(packets, species, m, seed);
}

ConditionalDynamics::ConditionalDynamics(std::vector<GaussianPacketSpec> packets,
                                         Species species, const Grid1D& grid,
                                         const UnitSystem& units,
                                         const PropagatorConfig& prop,
                                         std::shared_ptr<const Potential1D> potential,
                                         std::vector<double> initial_positions,
                                         bool allow_column_collapse)
    : packets_(std::move(packets)),
      species_(species),
      grid_(grid),
      units_(units),
      prop_cfg_(prop),
      potential_(std::move(potential)),
      n_(static_cast<int>(packets_.size())) {
    if (static_cast<int>(initial_positions.size()) != n_)
        throw Error("ConditionalDynamics: positions/packets mismatch");
    if (prop_cfg_.dt <= 0.0)
        throw Error("ConditionalDynamics: trajectory integration needs dt > 0");
    check_degenerate(packets_, species_);
    collapsed_ = !distinguishable() && allow_column_collapse && potential_->context_free();

    prop_ = std::make_unique<Propagator1D>(grid_, units_, prop_cfg_);
    x_ = std::move(initial_positions);
    v_.assign(n_, 0.0);

    fields_.reserve(field_count());
    if (distinguishable() || collapsed_) {
        for (int l = 0; l < n_; ++l) fields_.push_back(build_packet(packets_[l], grid_));
    } else {
        for (int l = 0; l < n_; ++l)
            for (int a = 0; a < n_; ++a) fields_.push_back(build_packet(packets_[l], grid_));
    }
    field_max_.assign(field_count(), 0.0);
    for (int i = 0; i < field_count(); ++i) field_max_[i] = fields_[i].max_abs();

    refresh_assembly();

    if (n_ > 0) {
        // conserved per-run energy, used as the node-region fallback for Q
        e_total_.assign(1, 0.0);
        double e = potential_energy({});
        for (int a = 0; a < n_; ++a) {
            const ParticleSample s = energy_sample(a);
            e += s.k + (s.node ? 0.0 : s.q);
        }
        e_total_[0] = e;
        e_total_ready_ = true;
    }
}

const WaveField1D& ConditionalDynamics::raw_field(int l, int a) const {
    if (distinguishable() && l != a)
        throw Error("raw_field: distinguishable set holds only diagonal fields");
    return fields_[field_index(l, a)];
}

// ---------------------------------------------------------------------------


void ConditionalDynamics::refresh_assembly() {
    if (n_ == 0) return;
    if (distinguishable()) {
        scale_.assign(n_, 0.0);
        for (int a = 0; a < n_; ++a) scale_[a] = field_max_[a];
        return;
    }
    // per-particle trajectory matrices T_a[l][k] = field(l,a)(x_k); one
    // stencil per coordinate, shared across rows and particles. Collapsed
    // sets have channel-independent fields, so one matrix serves every a.
    std::vector<LagrangeStencil> st(n_);
    for (int k = 0; k < n_; ++k) st[k] = LagrangeStencil::at(grid_, x_[k]);

    coef_.assign(static_cast<size_t>(n_) * n_, cplx(0, 0));
    std::vector<cplx> t(static_cast<size_t>(n_) * n_);
    std::vector<cplx> cof(static_cast<size_t>(n_) * n_);
    const int n_mats = collapsed_ ? 1 : n_;
    for (int a = 0; a < n_mats; ++a) {
        for (int l = 0; l < n_; ++l) {
            const cplx* amp = fields_[field_index(l, a)].amp.data();
            for (int k = 0; k < n_; ++k)
                t[static_cast<size_t>(l) * n_ + k] = st[k].value(amp);
        }
        cofactor_matrix(t.data(), n_, species_, cof.data());
        if (collapsed_) {
            for (int aa = 0; aa < n_; ++aa)
                for (int l = 0; l < n_; ++l)
                    coef_[static_cast<size_t>(aa) * n_ + l] =
                        cof[static_cast<size_t>(l) * n_ + aa];
        } else {
            for (int l = 0; l < n_; ++l)
                coef_[static_cast<size_t>(a) * n_ + l] =
                    cof[static_cast<size_t>(l) * n_ + a];
        }
    }

    // assembled-field magnitude per particle from a strided scan
    scale_.assign(n_, 0.0);
    const int stride = std::max(1, grid_.n / 128);
    for (int a = 0; a < n_; ++a) {
        const cplx* ca = coef_.data() + static_cast<size_t>(a) * n_;
        double best = 0.0;
        for (int i = 0; i < grid_.n; i += stride) {
            cplx v(0, 0);
            for (int l = 0; l < n_; ++l) v += ca[l] * fields_[field_index(l, a)].amp[i];
            best = std::max(best, std::norm(v));
        }
        scale_[a] = std::sqrt(best);
        double amag = 0.0, fmax = 0.0;
        for (int l = 0; l < n_; ++l) {
            amag += std::abs(ca[l]);
            fmax = std::max(fmax, field_max_[field_index(l, a)]);
        }
        if (!(amag > 0.0) || scale_[a] < 1e-14 * amag * fmax)
            throw NullAssembly("assembled conditional wave function for particle " +
                               std::to_string(a) + " vanished (norm scale " +
                               std::to_string(scale_[a]) + ")");
    }
}

VelocitySample ConditionalDynamics::velocity_sample(int a, double x) const {
    if (distinguishable())
        return velocity_at(fields_[a], x, field_max_[a], units_);

    const auto st = LagrangeStencil::at(grid_, x);
    cplx v(0, 0), d(0, 0);
    const cplx* ca = coef_.data() + static_cast<size_t>(a) * n_;
    for (int l = 0; l < n_; ++l) {
        if (ca[l] == cplx(0, 0)) continue;
        cplx fv, fd;
        st.value_and_deriv(fields_[field_index(l, a)].amp.data(), fv, fd);
        v += ca[l] * fv;
        d += ca[l] * fd;
    }
    const double eps = node_epsilon_rel * scale_[a];
    const double a2 = std::norm(v);
    const double hbar_over_m = units_.hbar2_over_m() / units_.hbar;
    if (a2 <= eps * eps) {
        double vv = 0.0;
        if (a2 > 0.0) {
            vv = hbar_over_m * (d * std::conj(v)).imag() / a2;
            if (!std::isfinite(vv)) vv = 0.0;
        }
        return {vv, true};
    }
    return {hbar_over_m * (d * std::conj(v)).imag() / a2, false};
}

void ConditionalDynamics::step(std::span<const double> cross) {
    const double dt = prop_cfg_.dt;
    if (n_ == 0) {
        time_ += dt;
        return;
    }
    const std::vector<double> x_start = x_;

    // (ii)+(iii) velocities from the frozen assembly, Heun advance
    for (int a = 0; a < n_; ++a) {
        auto v_eval = [&](double xx) { return velocity_sample(a, xx); };
        const TrajectoryStep ts = advance_trajectory(x_[a], dt, grid_, v_eval);
        x_[a] = ts.x;
        v_[a] = ts.v;
    }

    // (iv) all fields advance under potentials at the step-start positions
    const int n_channels = collapsed_ ? 1 : n_;
    if (static_cast<int>(vpot_buf_.size()) < grid_.n * n_channels)
        vpot_buf_.resize(static_cast<size_t>(grid_.n) * n_channels);
    for (int a = 0; a < n_channels; ++a) {
        ctx_buf_.clear();
        if (!collapsed_) {
            for (int b = 0; b < n_; ++b)
                if (b != a) ctx_buf_.push_back(x_start[b]);
        }
        PotentialContext ctx{ctx_buf_, cross, time_};
        potential_->fill(grid_, ctx,
                         std::span<double>(vpot_buf_.data() + static_cast<size_t>(a) * grid_.n,
                                           grid_.n));
    }
    const int nf = field_count();
    parallel_for(nf, [&](long idx) {
        int a;
        if (distinguishable())
            a = collapsed_ ? 0 : static_cast<int>(idx);
        else
            a = collapsed_ ? 0 : static_cast<int>(idx) % n_;
        std::span<const double> v(vpot_buf_.data() + static_cast<size_t>(a) * grid_.n,
                                  grid_.n);
        field_max_[idx] = prop_->step(fields_[idx], v);
    }, 4);

    time_ += dt;
    refresh_assembly();
}

ConditionalDynamics::ParticleSample ConditionalDynamics::energy_sample(int a) const {
    const double v_cap = grid_.dx() / prop_cfg_.dt;
    const VelocitySample vs = velocity_sample(a, x_[a]);
    const double vv = capped(vs.v, v_cap);
    ParticleSample out;
    out.k = 0.5 * units_.mass() * vv * vv;

    std::optional<double> q;
    if (distinguishable()) {
        q = try_quantum_potential(fields_[a], x_[a], field_max_[a], units_);
    } else {
        // three-point second difference of the assembled modulus at the
        // nearest grid node
        const double dx = grid_.dx();
        int i = static_cast<int>(std::lround((x_[a] - grid_.x_min) / dx));
        i = std::min(std::max(i, 1), grid_.n - 2);
        double r[3];
        const cplx* ca = coef_.data() + static_cast<size_t>(a) * n_;
        for (int o = -1; o <= 1; ++o) {
            cplx vsum(0, 0);
            for (int l = 0; l < n_; ++l)
                vsum += ca[l] * fields_[field_index(l, a)].amp[i + o];
            r[o + 1] = std::abs(vsum);
        }
        if (r[1] > node_epsilon_rel * scale_[a])
            q = -0.5 * units_.hbar2_over_m() * (r[0] - 2.0 * r[1] + r[2]) / (dx * dx) /
                r[1];
    }

    if (!q || vs.node) {
        out.node = true;
        out.q = 0.0; // caller applies the conservation fallback
    } else {
        out.q = *q;
    }
    return out;
}

double ConditionalDynamics::potential_energy(std::span<const double> cross) const {
    return potential_->configuration_energy(x_, cross, time_);
}

double ConditionalDynamics::total_energy_reference() const {
    return e_total_ready_ ? e_total_[0] : std::nan("");
}

WaveField1D ConditionalDynamics::assemble_conditional(int a) const {
    WaveField1D out(grid_);
    out.time = time_;
    if (distinguishable()) {
        out = fields_[a];
        out.normalize();
        return out;
    }
    const cplx* ca = coef_.data() + static_cast<size_t>(a) * n_;
    for (int i = 0; i < grid_.n; ++i) {
        cplx v(0, 0);
        for (int l = 0; l < n_; ++l) v += ca[l] * fields_[field_index(l, a)].amp[i];
        out.amp[i] = v;
    }
    const double nrm = out.norm();
    if (nrm < 1e-14)
        throw NullAssembly("assemble_conditional: norm " + std::to_string(nrm));
    out.normalize();
    return out;
}

std::vector<cplx> ConditionalDynamics::trajectory_matrix(int a) const {
    std::vector<cplx> t(static_cast<size_t>(n_) * n_);
    for (int k = 0; k < n_; ++k) {
        const auto st = LagrangeStencil::at(grid_, x_[k]);
        for (int l = 0; l < n_; ++l)
            t[static_cast<size_t>(l) * n_ + k] =
                st.value(fields_[field_index(l, a)].amp.data());
    }
    return t;
}

void ConditionalDynamics::add_particle(const GaussianPacketSpec& packet, double x0) {
    const int n_old = n_;
    const int n_new = n_old + 1;
    if (distinguishable() || collapsed_) {
        WaveField1D f = build_packet(packet, grid_);
        f.time = time_;
        fields_.push_back(std::move(f));
        field_max_.push_back(fields_.back().max_abs());
    } else {
        std::vector<WaveField1D> nf;
        std::vector<double> nmax;
        nf.reserve(static_cast<size_t>(n_new) * n_new);
        nmax.reserve(static_cast<size_t>(n_new) * n_new);
        for (int l = 0; l < n_new; ++l) {
            for (int a = 0; a < n_new; ++a) {
                if (l < n_old && a < n_old) {
                    nf.push_back(std::move(fields_[static_cast<size_t>(l) * n_old + a]));
                    nmax.push_back(field_max_[static_cast<size_t>(l) * n_old + a]);
                } else if (l == n_old) {
                    // fresh packet occupies its whole row (step-3 rule)
                    WaveField1D f = build_packet(packet, grid_);
                    f.time = time_;
                    nf.push_back(std::move(f));
                    nmax.push_back(nf.back().max_abs());
                } else {
                    // new channel for an existing packet: adopt its
                    // own-channel history
                    nf.push_back(nf[static_cast<size_t>(l) * n_new + l]);
                    nmax.push_back(nmax[static_cast<size_t>(l) * n_new + l]);
                }
            }
        }
        fields_ = std::move(nf);
        field_max_ = std::move(nmax);
    }
    packets_.push_back(packet);
    x_.push_back(x0);
    v_.push_back(0.0);
    n_ = n_new;
    e_total_ready_ = false;
    refresh_assembly();
}

void ConditionalDynamics::remove_particle(int index) {
    const int n_old = n_;
    const int n_new = n_old - 1;
    if (n_new < 0 || index < 0 || index >= n_old)
        throw Error("remove_particle: bad index");
    if (distinguishable() || collapsed_) {
        fields_.erase(fields_.begin() + index);
        field_max_.erase(field_max_.begin() + index);
    } else {
        std::vector<WaveField1D> nf;
        std::vector<double> nmax;
        nf.reserve(static_cast<size_t>(n_new) * n_new);
        for (int l = 0; l < n_old; ++l) {
            if (l == index) continue;
            for (int a = 0; a < n_old; ++a) {
                if (a == index) continue;
                nf.push_back(std::move(fields_[static_cast<size_t>(l) * n_old + a]));
                nmax.push_back(field_max_[static_cast<size_t>(l) * n_old + a]);
            }
        }
        fields_ = std::move(nf);
        field_max_ = std::move(nmax);
    }
    packets_.erase(packets_.begin() + index);
    x_.erase(x_.begin() + index);
    v_.erase(v_.begin() + index);
    n_ = n_new;
    e_total_ready_ = false;
    if (n_ > 0) refresh_assembly();
}

// ---------------------------------------------------------------------------

SharedFieldEnsemble::SharedFieldEnsemble(std::vector<GaussianPacketSpec> packets,
                                         Species species, const Grid1D& grid,
                                         const UnitSystem& units,
                                         const PropagatorConfig& prop,
                                         std::shared_ptr<const Potential1D> potential,
                                         std::vector<std::vector<double>> initial_positions)
    : species_(species), grid_(grid), units_(units), potential_(std::move(potential)) {
    if (!potential_->context_free())
        throw Error("SharedFieldEnsemble requires a context-free potential");
    n_ = static_cast<int>(packets.size());
    check_degenerate(packets, species_);
    prop_ = std::make_unique<Propagator1D>(grid_, units_, prop);
    for (int l = 0; l < n_; ++l) fields_.push_back(build_packet(packets[l], grid_));
    field_max_.assign(n_, 0.0);
    for (int l = 0; l < n_; ++l) field_max_[l] = fields_[l].max_abs();

    x_ = std::move(initial_positions);
    v_.assign(x_.size(), std::vector<double>(n_, 0.0));
    e_total_.assign(x_.size(), 0.0);
    for (size_t m = 0; m < x_.size(); ++m) {
        double e = potential_->configuration_energy(x_[m], {}, 0.0);
        for (int a = 0; a < n_; ++a) {
            const auto s = energy_sample(static_cast<int>(m), a);
            e += s.k + (s.node ? 0.0 : s.q);
        }
        e_total_[m] = e;
    }
}

void SharedFieldEnsemble::member_assembly(int m, std::vector<cplx>& cof,
                                          std::vector<double>& scale) const {
    if (species_ == Species::Distinguishable) {
        cof.clear();
        scale.assign(n_, 0.0);
        for (int a = 0; a < n_; ++a) scale[a] = field_max_[a];
        return;
    }
    std::vector<cplx> t(static_cast<size_t>(n_) * n_);
    for (int k = 0; k < n_; ++k) {
        const auto st = LagrangeStencil::at(grid_, x_[m][k]);
        for (int l = 0; l < n_; ++l)
            t[static_cast<size_t>(l) * n_ + k] = st.value(fields_[l].amp.data());
    }
    cof.assign(static_cast<size_t>(n_) * n_, cplx(0, 0));
    cofactor_matrix(t.data(), n_, species_, cof.data());

    scale.assign(n_, 0.0);
    const int stride = std::max(1, grid_.n / 128);
    for (int a = 0; a < n_; ++a) {
        double best = 0.0;
        for (int i = 0; i < grid_.n; i += stride) {
            cplx v(0, 0);
            for (int l = 0; l < n_; ++l)
                v += cof[static_cast<size_t>(l) * n_ + a] * fields_[l].amp[i];
            best = std::max(best, std::norm(v));
        }
        scale[a] = std::sqrt(best);
    }
}

VelocitySample SharedFieldEnsemble::velocity_sample(const std::vector<cplx>& cof,
                                                    std::span<const double> scale, int a,
                                                    double x) const {
    if (species_ == Species::Distinguishable)
        return velocity_at(fields_[a], x, field_max_[a], units_);
    const auto st = LagrangeStencil::at(grid_, x);
    cplx v(0, 0), d(0, 0);
    for (int l = 0; l < n_; ++l) {
        const cplx c = cof[static_cast<size_t>(l) * n_ + a];
        cplx fv, fd;
        st.value_and_deriv(fields_[l].amp.data(), fv, fd);
        v += c * fv;
        d += c * fd;
    }
    const double eps = node_epsilon_rel * scale[a];
    const double a2 = std::norm(v);
    const double hbar_over_m = units_.hbar2_over_m() / units_.hbar;
    if (a2 <= eps * eps) {
        double vv = 0.0;
        if (a2 > 0.0) {
            vv = hbar_over_m * (d * std::conj(v)).imag() / a2;
            if (!std::isfinite(vv)) vv = 0.0;
        }
        return {vv, true};
    }
    return {hbar_over_m * (d * std::conj(v)).imag() / a2, false};
}

void SharedFieldEnsemble::step() {
    const double dt = prop_->config().dt;
    const long m_count = static_cast<long>(x_.size());
    // members advance on the frozen fields; fields advance afterwards
    parallel_for(m_count, [&](long m) {
        std::vector<cplx> cof;
        std::vector<double> scale;
        member_assembly(static_cast<int>(m), cof, scale);
        auto& xm = x_[m];
        auto& vm = v_[m];
        for (int a = 0; a < n_; ++a) {
            auto v_eval = [&](double xx) { return velocity_sample(cof, scale, a, xx); };
            const TrajectoryStep ts = advance_trajectory(xm[a], dt, grid_, v_eval);
            xm[a] = ts.x;
            vm[a] = ts.v;
        }
    }, 64);

    PotentialContext ctx{{}, {}, time_};
    for (int l = 0; l < n_; ++l) field_max_[l] = prop_->step(fields_[l], *potential_, ctx);
    time_ += dt;
}

ConditionalDynamics::ParticleSample SharedFieldEnsemble::energy_sample(int m, int a) const {
    std::vector<cplx> cof;
    std::vector<double> scale;
    member_assembly(m, cof, scale);
    const double v_cap = grid_.dx() / prop_->config().dt;
    const VelocitySample vs = velocity_sample(cof, scale, a, x_[m][a]);
    const double vv = capped(vs.v, v_cap);
    ConditionalDynamics::ParticleSample out;
    out.k = 0.5 * units_.mass() * vv * vv;

    const double dx = grid_.dx();
    int i = static_cast<int>(std::lround((x_[m][a] - grid_.x_min) / dx));
    i = std::min(std::max(i, 1), grid_.n - 2);
    double r[3];
    for (int o = -1; o <= 1; ++o) {
        if (species_ == Species::Distinguishable) {
            r[o + 1] = std::abs(fields_[a].amp[i + o]);
        } else {
            cplx vsum(0, 0);
            for (int l = 0; l < n_; ++l)
                vsum += cof[static_cast<size_t>(l) * n_ + a] * fields_[l].amp[i + o];
            r[o + 1] = std::abs(vsum);
        }
    }
    const double sc = species_ == Species::Distinguishable ? field_max_[a] : scale[a];
    if (vs.node || r[1] <= node_epsilon_rel * sc) {
        out.node = true;
        out.q = 0.0;
    } else {
        out.q = -0.5 * units_.hbar2_over_m() * (r[0] - 2.0 * r[1] + r[2]) / (dx * dx) /
                r[1];
    }
    return out;
}

// ---------------------------------------------------------------------------

SwapSymmetryReport swap_symmetry_check(const std::vector<GaussianPacketSpec>& packets,
                                       Species species, const Grid1D& grid,
                                       const UnitSystem& units,
                                       const PropagatorConfig& prop,
                                       std::shared_ptr<const Potential1D> potential,
                                       std::vector<double> positions, int i, int j,
                                       int n_steps, double tol) {
    SwapSymmetryReport rep;
    if (species == Species::Distinguishable) {
        rep.applicable = false;
        return rep;
    }
    std::vector<double> swapped = positions;
    std::swap(swapped[i], swapped[j]);

    ConditionalDynamics run_l(packets, species, grid, units, prop, potential, positions);
    ConditionalDynamics run_f(packets, species, grid, units, prop, potential, swapped);

    const double scale = 0.5 * (grid.x_max - grid.x_min);
    double worst = 0.0;
    const int n = static_cast<int>(packets.size());
    for (int s = 0; s < n_steps; ++s) {
        run_l.step();
        run_f.step();
        for (int k = 0; k < n; ++k) {
            const int k_f = (k == i) ? j : (k == j) ? i : k;
            worst = std::max(worst,
                             std::abs(run_l.positions()[k] - run_f.positions()[k_f]) / scale);
        }
    }
    rep.max_rel_deviation = worst;
    rep.pass = worst <= tol;
    return rep;
}

void SpinChannelSystem::step() {
    const std::vector<double> up_x = up_->positions();
    const std::vector<double> down_x = down_->positions();
    if (coupled_) {
        up_->step(down_x);
        down_->step(up_x);
    } else {
        up_->step();
        down_->step();
    }
}

void write_field_dump(const std::string& path, const WaveField1D& f) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error("write_field_dump: cannot open " + path);
    const double x_min = f.grid.x_min, x_max = f.grid.x_max, t = f.time;
    const uint64_t n = static_cast<uint64_t>(f.grid.n);
    std::fwrite(&x_min, sizeof(double), 1, fp);
    std::fwrite(&x_max, sizeof(double), 1, fp);
    std::fwrite(&n, sizeof(uint64_t), 1, fp);
    std::fwrite(&t, sizeof(double), 1, fp);
    for (const auto& a : f.amp) {
        const double re = a.real(), im = a.imag();
        std::fwrite(&re, sizeof(double), 1, fp);
        std::fwrite(&im, sizeof(double), 1, fp);
    }
    std::fclose(fp);
}

} // namespace bohmex
