#include "core/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace bohmex {

void DeviceConfig::validate() const {
    if (l_active <= 0 || contact_extension <= 0 || injection_sigma <= 0)
        throw ConfigError("device geometry must be positive");
    if (contact_extension < injection_offset + 6.0 * injection_sigma)
        throw GridTooNarrow("contact extension cannot represent the injected packets");
    if (exit_plane_source() - (-contact_extension) < cap_width)
        throw ConfigError("removal plane sits inside the absorbing layer");
    if (fermi_level <= 0 || temperature <= 0 || mass_eff_ratio <= 0)
        throw ConfigError("contact statistics parameters must be positive");
    if (k_cells < 1 || population_cap < 1 || grid_points < 64)
        throw ConfigError("k_cells, population_cap and grid_points must be sensible");
    if (dt <= 0 || current_bin < dt)
        throw ConfigError("need dt > 0 and current_bin >= dt");
}

const char* mode_name(InteractionMode m) {
    switch (m) {
        case InteractionMode::WI: return "WI";
        case InteractionMode::CI: return "CI";
        case InteractionMode::EI: return "EI";
        case InteractionMode::CEI: return "CEI";
    }
    return "?";
}

std::vector<InjectionCell> make_injection_cells(const DeviceConfig& cfg,
                                                const UnitSystem& units, int contact) {
    const double kT = constants::k_boltzmann * cfg.temperature;
    // occupation drops below 1e-6 past this kinetic energy
    const double ek_max =
        cfg.fermi_level - cfg.subband_offset + kT * std::log(1e6);
    const double k_max = units.wavevector(std::max(ek_max, 1e-6));
    const double dk = k_max / cfg.k_cells;

    std::vector<InjectionCell> cells(cfg.k_cells);
    for (int i = 0; i < cfg.k_cells; ++i) {
        InjectionCell& c = cells[i];
        c.contact = contact;
        c.k_lo = i * dk;
        c.k_hi = (i + 1) * dk;
        c.k_center = (i + 0.5) * dk;
        c.t0 = constants::pi / (units.velocity(c.k_center) * dk);
        const double e = cfg.subband_offset + units.kinetic(c.k_center);
        c.occupation = 1.0 / (1.0 + std::exp((e - cfg.fermi_level) / kT));
        c.next_attempt = 1;
    }
    return cells;
}

std::vector<InjectionEvent> injection_attempts(InjectionCell& cell, double t_begin,
                                               double t_end, const DeviceConfig& cfg,
                                               const UnitSystem& units, Rng& rng,
                                               long& spin_counter) {
    std::vector<InjectionEvent> out;
    for (;;) {
        const double t_attempt = cell.next_attempt * cell.t0;
        if (t_attempt >= t_end) break;
        ++cell.next_attempt;
        if (t_attempt < t_begin) continue; // window started past this attempt
        const double r = rng.uniform();
        if (r >= cell.occupation) continue;

        InjectionEvent ev;
        ev.time = t_attempt;
        ev.contact = cell.contact;
        ev.spin = static_cast<int>(spin_counter++ & 1);
        const double x0 = cell.contact == 0 ? cfg.source_x0() : cfg.drain_x0();
        const int dir = cell.contact == 0 ? +1 : -1;
        ev.packet = GaussianPacketSpec::from_wavevector(x0, dir * cell.k_center,
                                                        cfg.injection_sigma, units);
        // quantum-equilibrium start: |psi|^2 is a Gaussian of std sigma/sqrt(2)
        double start = x0 + rng.normal() * cfg.injection_sigma / std::sqrt(2.0);
        const double lim = 4.0 * cfg.injection_sigma;
        ev.start_position = std::min(std::max(start, x0 - lim), x0 + lim);
        out.push_back(ev);
    }
    return out;
}

double CurrentRecord::mean(double t_from) const {
    const long i0 = std::max(0L, static_cast<long>(t_from / bin_width));
    if (i0 >= static_cast<long>(current.size())) return 0.0;
    double s = 0.0;
    for (size_t i = i0; i < current.size(); ++i) s += current[i];
    return s / (static_cast<double>(current.size()) - i0);
}

DwellStatistics dwell_statistics(const std::vector<FlightRecord>& records) {
    DwellStatistics d;
    for (const auto& r : records) {
        if (!(r.t_out > r.t_in))
            throw Error("dwell_statistics: record " + std::to_string(r.id) +
                        " is not closed");
        const double w = r.dwell;
        if (r.entry == 0 && r.exit == 1) d.d_sd += w;
        else if (r.entry == 1 && r.exit == 0) d.d_ds += w;
        else if (r.entry == 0 && r.exit == 0) d.d_ss += w;
        else d.d_dd += w;
    }
    d.total = d.d_sd + d.d_ds + d.d_ss + d.d_dd;
    if (d.total <= 0.0) {
        d.empty = true;
        return d;
    }
    d.d_sd /= d.total;
    d.d_ds /= d.total;
    d.d_ss /= d.total;
    d.d_dd /= d.total;
    return d;
}

namespace {

struct ElectronMeta {
    long id = -1;
    int spin = 0;
    int origin = 0;
    double t_created = 0.0;
    bool entered = false;
    bool inside = false;
    double t_in = 0.0;
    double t_out = 0.0;
    int last_exit = 0;
    double dwell = 0.0;
    double prev_x = 0.0;
};

struct Channel {
    std::unique_ptr<ConditionalDynamics> dyn;
    std::vector<ElectronMeta> meta;
    int size() const { return dyn ? dyn->n() : 0; }
};

} // namespace

TransportResult run_transport(const DeviceConfig& cfg, InteractionMode mode,
                              double t_total, uint64_t seed) {
    cfg.validate();
    UnitSystem units;
    units.mass_eff_ratio = cfg.mass_eff_ratio;
    const Grid1D grid = cfg.grid();

    PropagatorConfig prop;
    prop.dt = cfg.dt;
    prop.boundary.kind = BoundaryConfig::Kind::Cap;
    prop.boundary.cap_width = cfg.cap_width;
    prop.boundary.cap_strength = cfg.cap_strength;

    std::vector<std::shared_ptr<const Potential1D>> parts;
    parts.push_back(std::make_shared<LinearRampPotential>(cfg.bias, cfg.l_active));
    if (mode_has_coulomb(mode))
        parts.push_back(
            std::make_shared<CoulombSoftPotential>(2.0 * grid.dx(), cfg.epsilon_r));
    auto potential = std::make_shared<SumPotential>(std::move(parts));

    const bool exchange = mode_has_exchange(mode);
    const Species species = exchange ? Species::Fermion : Species::Distinguishable;
    const int n_channels = exchange ? 2 : 1;
    Channel channels[2];
    for (int c = 0; c < n_channels; ++c)
        channels[c].dyn = std::make_unique<ConditionalDynamics>(
            std::vector<GaussianPacketSpec>{}, species, grid, units, prop, potential,
            std::vector<double>{});

    Rng master(seed);
    std::vector<InjectionCell> cells[2] = {make_injection_cells(cfg, units, 0),
                                           make_injection_cells(cfg, units, 1)};
    std::vector<Rng> cell_rng[2];
    for (int c = 0; c < 2; ++c)
        for (size_t i = 0; i < cells[c].size(); ++i)
            cell_rng[c].push_back(master.fork(1000ULL * (c + 1) + i));
    long spin_counter[2] = {0, 0};

    TransportResult res;
    const long n_steps = static_cast<long>(std::ceil(t_total / cfg.dt));
    const long n_bins = static_cast<long>(std::ceil(t_total / cfg.current_bin));
    res.current.bin_width = cfg.current_bin;
    res.current.current.assign(n_bins, 0.0);

    long next_id = 0;
    double pop_integral = 0.0;
    double field_integral = 0.0;
    const double drain_plane = cfg.l_active;

    for (long s = 0; s < n_steps; ++s) {
        const double t = s * cfg.dt;
        const double t_next = t + cfg.dt;

        // ---- injection attempts inside [t, t_next)
        for (int c = 0; c < 2; ++c) {
            for (size_t ic = 0; ic < cells[c].size(); ++ic) {
                auto events = injection_attempts(cells[c][ic], t, t_next, cfg, units,
                                                 cell_rng[c][ic], spin_counter[c]);
                for (const auto& ev : events) {
                    const int pop = channels[0].size() + (exchange ? channels[1].size() : 0);
                    if (pop >= cfg.population_cap)
                        throw PopulationOverflow(
                            "in-flight population would exceed the cap of " +
                            std::to_string(cfg.population_cap));
                    Channel& ch = channels[exchange ? ev.spin : 0];
                    ch.dyn->add_particle(ev.packet, ev.start_position);
                    ElectronMeta m;
                    m.id = next_id++;
                    m.spin = ev.spin;
                    m.origin = ev.contact;
                    m.t_created = ev.time;
                    m.prev_x = ev.start_position;
                    ch.meta.push_back(m);
                    ++res.injected;
                }
            }
        }

        // ---- lockstep evolution (cross-channel Coulomb context for CEI)
        if (exchange) {
            const std::vector<double> up_x = channels[0].dyn->positions();
            const std::vector<double> down_x = channels[1].dyn->positions();
            if (mode == InteractionMode::CEI) {
                channels[0].dyn->step(down_x);
                channels[1].dyn->step(up_x);
            } else {
                channels[0].dyn->step();
                channels[1].dyn->step();
            }
        } else if (channels[0].size() > 0) {
            channels[0].dyn->step();
        }

        // ---- bookkeeping: active-region dwell, drain-plane crossings, exits
        for (int c = 0; c < n_channels; ++c) {
            Channel& ch = channels[c];
            std::vector<int> to_remove;
            for (int i = 0; i < ch.size(); ++i) {
                ElectronMeta& m = ch.meta[i];
                const double x = ch.dyn->positions()[i];

                if ((m.prev_x < drain_plane && x >= drain_plane) ||
                    (m.prev_x >= drain_plane && x < drain_plane)) {
                    const int dirn = x > m.prev_x ? +1 : -1;
                    const long bin =
                        std::min(n_bins - 1, static_cast<long>(t_next / cfg.current_bin));
                    res.current.current[bin] += dirn / cfg.current_bin;
                    res.current.net_crossings += dirn;
                }

                const bool inside_now = x >= 0.0 && x <= cfg.l_active;
                if (inside_now) {
                    if (!m.entered) {
                        m.entered = true;
                        m.t_in = t_next;
                        ++res.entered_active;
                    }
                    m.dwell += cfg.dt;
                    m.inside = true;
                } else if (m.inside) {
                    m.inside = false;
                    m.t_out = t_next;
                    m.last_exit = x < 0.0 ? 0 : 1;
                }
                m.prev_x = x;

                if (x <= cfg.exit_plane_source() || x >= cfg.exit_plane_drain())
                    to_remove.push_back(i);
            }
            for (auto it = to_remove.rbegin(); it != to_remove.rend(); ++it) {
                const int i = *it;
                const ElectronMeta& m = ch.meta[i];
                if (m.entered && !m.inside && m.t_out > m.t_in) {
                    FlightRecord r;
                    r.id = m.id;
                    r.t_in = m.t_in;
                    r.t_out = m.t_out;
                    r.entry = m.origin;
                    r.exit = m.last_exit;
                    r.spin = m.spin;
                    r.dwell = m.dwell;
                    res.flights.push_back(r);
                }
                ch.dyn->remove_particle(i);
                ch.meta.erase(ch.meta.begin() + i);
                ++res.removed;
            }
        }

        int pop = 0, fields = 0;
        for (int c = 0; c < n_channels; ++c) {
            pop += channels[c].size();
            const int nc = channels[c].size();
            fields += exchange && mode == InteractionMode::CEI ? nc * nc : nc;
        }
        res.max_inflight = std::max(res.max_inflight, pop);
        pop_integral += pop;
        field_integral += fields;
    }

    for (int c = 0; c < n_channels; ++c)
        for (const auto& m : channels[c].meta)
            if (m.entered) ++res.unclosed;

    res.mean_inflight = pop_integral / n_steps;
    res.mean_fields = field_integral / n_steps;
    res.transient = std::min(4000.0, 0.25 * t_total);
    res.mean_current = res.current.mean(res.transient);
    return res;
}

} // namespace bohmex
