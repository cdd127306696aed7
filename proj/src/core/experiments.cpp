#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace bohmex {

namespace {

struct RawSample {
    double k = 0.0;
    double q = 0.0;
    bool node = false;
};

// distribute the conservation residue over node-flagged particles
void ledger_add_member(EnergyLedger& led, int slot, std::vector<RawSample>& s,
                       double v_config, double e_total) {
    const int n = static_cast<int>(s.size());
    double k_sum = 0.0, q_off = 0.0;
    int nodes = 0;
    for (const auto& p : s) {
        k_sum += p.k;
        if (p.node)
            ++nodes;
        else
            q_off += p.q;
    }
    if (nodes > 0 && std::isfinite(e_total)) {
        const double residue = (e_total - k_sum - v_config - q_off) / nodes;
        for (auto& p : s)
            if (p.node) p.q = residue;
    }
    for (int a = 0; a < n; ++a) led.add(slot, a, s[a].k, s[a].q, s[a].node);
    led.add_member(slot, v_config);
}

struct PairTracker {
    int n = 0;
    std::vector<int8_t> sign; // member-major, one per (i<j) pair
    double min_distance = std::numeric_limits<double>::infinity();
    long sign_changes = 0;

    PairTracker(int members, int particles) : n(particles) {
        sign.assign(static_cast<size_t>(members) * pair_count(), 0);
    }
    int pair_count() const { return n * (n - 1) / 2; }

    void update(int member, std::span<const double> x) {
        int p = 0;
        int8_t* ms = sign.data() + static_cast<size_t>(member) * pair_count();
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j, ++p) {
                const double d = x[i] - x[j];
                min_distance = std::min(min_distance, std::abs(d));
                const int8_t sg = d > 0 ? 1 : (d < 0 ? -1 : 0);
                if (sg != 0) {
                    if (ms[p] != 0 && sg != ms[p]) ++sign_changes;
                    ms[p] = sg;
                }
            }
        }
    }
};

double capv(double v, double cap) { return std::min(std::max(v, -cap), cap); }

template <typename GetPair>
double median_distance(int members, GetPair get) {
    std::vector<double> d(members);
    for (int m = 0; m < members; ++m) d[m] = get(m);
    std::nth_element(d.begin(), d.begin() + members / 2, d.end());
    return d[members / 2];
}

} // namespace

EnsembleResult run_shared_field_ensemble(const EnsembleSpec& spec) {
    const int n = static_cast<int>(spec.packets.size());
    auto pot = spec.potential ? spec.potential
                              : std::shared_ptr<const Potential1D>(new FreePotential());
    auto positions =
        sample_initial_positions(spec.packets, spec.species, spec.grid, spec.members,
                                 spec.seed);
    SharedFieldEnsemble ens(spec.packets, spec.species, spec.grid, spec.units, spec.prop,
                            pot, std::move(positions));

    const int slots = spec.n_steps / spec.record_stride + 1;
    EnergyLedger ledger(slots, n);
    PairTracker tracker(spec.members, n);
    EnsembleResult out;
    out.tracks.times.reserve(slots);
    out.tracks.x.assign(spec.track_count, {});
    out.tracks.v.assign(spec.track_count, {});

    std::vector<RawSample> buffer(static_cast<size_t>(spec.members) * n);
    auto record = [&](int slot) {
        ledger.set_time(slot, ens.time());
        parallel_for(spec.members, [&](long m) {
            for (int a = 0; a < n; ++a) {
                const auto s = ens.energy_sample(static_cast<int>(m), a);
                buffer[static_cast<size_t>(m) * n + a] = {s.k, s.q, s.node};
            }
        }, 32);
        std::vector<RawSample> row(n);
        for (int m = 0; m < spec.members; ++m) {
            for (int a = 0; a < n; ++a) row[a] = buffer[static_cast<size_t>(m) * n + a];
            // context-free potentials still contribute external energy
            const double vc =
                pot->configuration_energy(ens.member_positions(m), {}, ens.time());
            ledger_add_member(ledger, slot, row, vc, ens.member_e_total(m));
        }
        out.tracks.times.push_back(ens.time());
        if (n == 2)
            out.median_pair_distance.push_back(median_distance(
                spec.members, [&](int m) {
                    return std::abs(ens.member_positions(m)[0] -
                                    ens.member_positions(m)[1]);
                }));
        for (int m = 0; m < spec.track_count; ++m) {
            for (int a = 0; a < n; ++a) {
                out.tracks.x[m].push_back(ens.member_positions(m)[a]);
                out.tracks.v[m].push_back(ens.member_velocities(m)[a]);
            }
        }
    };

    for (int m = 0; m < spec.members; ++m) tracker.update(m, ens.member_positions(m));
    record(0);
    for (int s = 1; s <= spec.n_steps; ++s) {
        ens.step();
        for (int m = 0; m < spec.members; ++m) tracker.update(m, ens.member_positions(m));
        if (s % spec.record_stride == 0) record(s / spec.record_stride);
    }

    out.energies = ledger.finalize(100);
    out.min_pair_distance = tracker.min_distance;
    out.diagonal_sign_changes = tracker.sign_changes;
    return out;
}

EnsembleResult run_conditional_ensemble(const EnsembleSpec& spec) {
    const int n = static_cast<int>(spec.packets.size());
    auto pot = spec.potential ? spec.potential
                              : std::shared_ptr<const Potential1D>(new FreePotential());
    auto positions = sample_initial_positions(spec.packets, spec.species, spec.grid,
                                              spec.members, spec.seed);

    const int slots = spec.n_steps / spec.record_stride + 1;
    constexpr int kBlock = 64;
    const int blocks = (spec.members + kBlock - 1) / kBlock;

    std::vector<EnergyLedger> block_ledger(blocks);
    std::vector<double> block_min(blocks, std::numeric_limits<double>::infinity());
    std::vector<long> block_flips(blocks, 0);
    EnsembleResult out;
    out.tracks.x.assign(spec.track_count, {});
    out.tracks.v.assign(spec.track_count, {});
    std::vector<double> track_times;

    parallel_for(blocks, [&](long b) {
        EnergyLedger led(slots, n);
        PairTracker tracker(kBlock, n);
        const int m_lo = static_cast<int>(b) * kBlock;
        const int m_hi = std::min(spec.members, m_lo + kBlock);
        std::vector<RawSample> row(n);
        for (int m = m_lo; m < m_hi; ++m) {
            ConditionalDynamics dyn(spec.packets, spec.species, spec.grid, spec.units,
                                    spec.prop, pot, positions[m]);
            const double e_total = dyn.total_energy_reference();
            const bool tracked = m < spec.track_count;

            auto record = [&](int slot) {
                led.set_time(slot, dyn.time());
                for (int a = 0; a < n; ++a) {
                    const auto s = dyn.energy_sample(a);
                    row[a] = {s.k, s.q, s.node};
                }
                ledger_add_member(led, slot, row, dyn.potential_energy(), e_total);
                if (tracked) {
                    if (m == 0) track_times.push_back(dyn.time());
                    for (int a = 0; a < n; ++a) {
                        out.tracks.x[m].push_back(dyn.positions()[a]);
                        out.tracks.v[m].push_back(dyn.velocities()[a]);
                    }
                }
            };

            tracker.update(m - m_lo, dyn.positions());
            record(0);
            for (int s = 1; s <= spec.n_steps; ++s) {
                dyn.step();
                tracker.update(m - m_lo, dyn.positions());
                if (s % spec.record_stride == 0) record(s / spec.record_stride);
            }
        }
        block_ledger[b] = std::move(led);
        block_min[b] = tracker.min_distance;
        block_flips[b] = tracker.sign_changes;
    }, 1);

    EnergyLedger ledger(slots, n);
    out.min_pair_distance = std::numeric_limits<double>::infinity();
    for (int b = 0; b < blocks; ++b) {
        ledger.merge(block_ledger[b]);
        out.min_pair_distance = std::min(out.min_pair_distance, block_min[b]);
        out.diagonal_sign_changes += block_flips[b];
    }
    out.tracks.times = std::move(track_times);
    out.energies = ledger.finalize(100);
    return out;
}

EnsembleResult run_exact_2d_ensemble(const Exact2DSpec& spec) {
    auto pot = spec.potential
                   ? spec.potential
                   : std::shared_ptr<const Potential2D>(new SeparablePotential2D(
                         std::make_shared<FreePotential>(), std::make_shared<FreePotential>()));

    WaveField2D field =
        build_manybody_2d(spec.p1, spec.p2, spec.species, spec.grid, spec.grid);
    auto start = sample_positions_2d(field, spec.members, spec.seed);

    Propagator2D prop2(spec.grid, spec.grid, spec.units, spec.prop);
    const double dt = spec.prop.dt;
    const double v_cap = spec.grid.dx() / dt;

    std::vector<double> x1(spec.members), x2(spec.members);
    for (int m = 0; m < spec.members; ++m) {
        x1[m] = start[m].x1;
        x2[m] = start[m].x2;
    }

    const int slots = spec.n_steps / spec.record_stride + 1;
    EnergyLedger ledger(slots, 2);
    PairTracker tracker(spec.members, 2);
    EnsembleResult out;
    out.tracks.x.assign(spec.track_count, {});
    out.tracks.v.assign(spec.track_count, {});

    double max_abs = field.max_abs();
    const double mass = spec.units.mass();

    std::vector<double> e_total(spec.members, 0.0);
    auto member_samples = [&](int m, RawSample* s, double* vcfg) {
        const auto vs = velocity_at_2d(field, x1[m], x2[m], max_abs, spec.units);
        const auto qs = quantum_potential_2d(field, x1[m], x2[m], max_abs, spec.units);
        const double v1 = capv(vs.v1, v_cap), v2 = capv(vs.v2, v_cap);
        const bool node = vs.node || qs.node;
        s[0] = {0.5 * mass * v1 * v1, qs.q1, node};
        s[1] = {0.5 * mass * v2 * v2, qs.q2, node};
        *vcfg = pot->eval(field.time, x1[m], x2[m]);
    };
    for (int m = 0; m < spec.members; ++m) {
        RawSample s[2];
        double vc = 0.0;
        member_samples(m, s, &vc);
        e_total[m] = s[0].k + s[1].k + vc + (s[0].node ? 0.0 : s[0].q) +
                     (s[1].node ? 0.0 : s[1].q);
    }

    std::vector<RawSample> buffer(static_cast<size_t>(spec.members) * 2);
    std::vector<double> vbuf(spec.members);
    std::vector<double> vel1(spec.members, 0.0), vel2(spec.members, 0.0);
    auto record = [&](int slot) {
        ledger.set_time(slot, field.time);
        parallel_for(spec.members, [&](long m) {
            member_samples(static_cast<int>(m), &buffer[2 * m], &vbuf[m]);
        }, 64);
        std::vector<RawSample> row(2);
        for (int m = 0; m < spec.members; ++m) {
            row[0] = buffer[2 * m];
            row[1] = buffer[2 * m + 1];
            ledger_add_member(ledger, slot, row, vbuf[m], e_total[m]);
        }
        out.tracks.times.push_back(field.time);
        out.median_pair_distance.push_back(median_distance(
            spec.members, [&](int m) { return std::abs(x1[m] - x2[m]); }));
        for (int m = 0; m < spec.track_count; ++m) {
            out.tracks.x[m].push_back(x1[m]);
            out.tracks.x[m].push_back(x2[m]);
            out.tracks.v[m].push_back(vel1[m]);
            out.tracks.v[m].push_back(vel2[m]);
        }
    };

    for (int m = 0; m < spec.members; ++m) {
        const double xs[2] = {x1[m], x2[m]};
        tracker.update(m, xs);
    }
    record(0);

    for (int s = 1; s <= spec.n_steps; ++s) {
        // trajectories ride the frozen field, then the field advances
        parallel_for(spec.members, [&](long m) {
            const auto s0 = velocity_at_2d(field, x1[m], x2[m], max_abs, spec.units);
            const double p1 =
                std::min(std::max(x1[m] + capv(s0.v1, v_cap) * dt, spec.grid.x_min),
                         spec.grid.x_max);
            const double p2 =
                std::min(std::max(x2[m] + capv(s0.v2, v_cap) * dt, spec.grid.x_min),
                         spec.grid.x_max);
            const auto s1 = velocity_at_2d(field, p1, p2, max_abs, spec.units);
            const double v1 = 0.5 * (capv(s0.v1, v_cap) + capv(s1.v1, v_cap));
            const double v2 = 0.5 * (capv(s0.v2, v_cap) + capv(s1.v2, v_cap));
            x1[m] = std::min(std::max(x1[m] + v1 * dt, spec.grid.x_min), spec.grid.x_max);
            x2[m] = std::min(std::max(x2[m] + v2 * dt, spec.grid.x_min), spec.grid.x_max);
            vel1[m] = v1;
            vel2[m] = v2;
        }, 64);
        prop2.step(field, *pot);
        if (s % 25 == 0) max_abs = field.max_abs();

        for (int m = 0; m < spec.members; ++m) {
            const double xs[2] = {x1[m], x2[m]};
            tracker.update(m, xs);
        }
        if (s % spec.record_stride == 0) record(s / spec.record_stride);
    }

    out.energies = ledger.finalize(100);
    out.min_pair_distance = tracker.min_distance;
    out.diagonal_sign_changes = tracker.sign_changes;
    return out;
}

} // namespace bohmex
