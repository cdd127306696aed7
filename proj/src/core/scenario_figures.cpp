#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/scenario_internal.hpp"

namespace bohmex {

namespace {

void warn_if_dt_coarse(ScenarioIO& io, const UnitSystem& u,
                       const std::vector<GaussianPacketSpec>& packets, double dt) {
    double k_hi = 0.0;
    for (const auto& p : packets)
        k_hi = std::max(k_hi, std::abs(p.k0) + 3.0 / p.sigma_x);
    const double phase = u.kinetic(k_hi) * dt / u.hbar;
    if (phase > constants::pi / 4.0)
        io.note("dt = " + std::to_string(dt) + " fs advances the fastest packet phase by " +
                std::to_string(phase) + " rad per step (> pi/4)");
}

void check_packets_on_grid(const std::vector<GaussianPacketSpec>& packets,
                           const Grid1D& g) {
    for (const auto& p : packets) (void)build_packet(p, g);
}

void write_energy_csv(const std::string& path, const EnergyLedger::Result& r) {
    const int n = static_cast<int>(r.series.empty() ? 0 : r.series[0].k_per_particle.size());
    std::vector<std::string> header = {"time_fs"};
    for (int a = 0; a < n; ++a) header.push_back("k" + std::to_string(a + 1) + "_ev");
    for (int a = 0; a < n; ++a) header.push_back("q" + std::to_string(a + 1) + "_ev");
    header.push_back("v_ev");
    header.push_back("total_ev");
    for (int a = 0; a < n; ++a) header.push_back("k" + std::to_string(a + 1) + "_se");
    header.push_back("node_fraction");
    CsvWriter csv(path, header);
    for (size_t s = 0; s < r.series.size(); ++s) {
        const auto& b = r.series[s];
        std::vector<double> row = {b.time};
        for (int a = 0; a < n; ++a) row.push_back(b.k_per_particle[a]);
        for (int a = 0; a < n; ++a) row.push_back(b.q_per_particle[a]);
        row.push_back(b.potential);
        row.push_back(b.total);
        for (int a = 0; a < n; ++a) row.push_back(r.k_se[s][a]);
        row.push_back(r.node_fraction[s]);
        csv.row(row);
    }
}

void write_tracks_csv(const std::string& path, const EnsembleTracks& tr, int n) {
    CsvWriter csv(path, {"pair", "step", "particle", "x_nm", "v_nm_fs"});
    for (size_t m = 0; m < tr.x.size(); ++m)
        for (size_t s = 0; s < tr.times.size(); ++s)
            for (int a = 0; a < n; ++a)
                csv.row({static_cast<double>(m), static_cast<double>(s),
                         static_cast<double>(a), tr.x[m][s * n + a], tr.v[m][s * n + a]});
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

// ---------------------------------------------------------------- fig 1

int scenario_fig1(ScenarioIO& io) {
    UnitSystem u;
    const double sigma = io.cfg.get_double("packets.sigma", 25.0);
    const double d_max = io.cfg.get_double("scan.d_max", 6.0);
    const double d_step = io.cfg.get_double("scan.d_step", 0.25);
    io.commit();
    if (io.validate_only) return 0;

    CsvWriter csv(io.path("kinetic_vs_d.csv"),
                  {"d", "t_fermion_ev", "t_distinguishable_ev"});
    const double sk = 1.0 / sigma;
    double first_close = -1.0;
    for (double d = d_step; d <= d_max + 1e-9; d += d_step) {
        // packets 2 and 3 sit at x1 -/+ h with a common wave-vector offset,
        // splitting d evenly between position and momentum
        const double h = sigma * d / std::sqrt(2.0);
        const double dk = sk * d / std::sqrt(2.0);
        std::vector<GaussianPacketSpec> p = {
            GaussianPacketSpec::from_wavevector(0.0, 0.0, sigma, u),
            GaussianPacketSpec::from_wavevector(-h, dk, sigma, u),
            GaussianPacketSpec::from_wavevector(+h, dk, sigma, u)};
        const double tf = ensemble_kinetic_energy(p, Species::Fermion, u);
        const double td = ensemble_kinetic_energy(p, Species::Distinguishable, u);
        csv.row({d, tf, td});
        if (first_close < 0 && std::abs(tf - td) / td < 0.01) first_close = d;
    }
    write_summary(io.path("summary.txt"),
                  {{"sigma_nm", fmt(sigma)},
                   {"first_d_within_1pct", fmt(first_close)}});
    return 0;
}

// ---------------------------------------------------------------- fig 3

namespace {

struct FreePairParams {
    UnitSystem u;
    std::vector<GaussianPacketSpec> packets;
    Grid1D grid;
    PropagatorConfig prop;
    int steps, stride, members, tracks;
};

FreePairParams read_free_pair(ScenarioIO& io, double e1, double e2,
                              int track_default = 0) {
    FreePairParams p;
    p.packets = {read_packet(io.cfg, "packet1", +50.0, e1, -1, 25.0, p.u),
                 read_packet(io.cfg, "packet2", -50.0, e2, +1, 25.0, p.u)};
    p.grid = read_grid(io.cfg, "grid", -400.0, 400.0, 2048);
    p.prop = read_prop(io.cfg, "run", 0.1);
    p.steps = static_cast<int>(io.cfg.get_long("run.steps", 6000));
    p.stride = static_cast<int>(io.cfg.get_long("run.record_stride", 20));
    p.members = static_cast<int>(io.cfg.get_long("run.members", 4000));
    p.tracks = static_cast<int>(io.cfg.get_long("run.track_count", track_default));
    return p;
}

EnsembleSpec to_spec(const FreePairParams& p, Species sp, uint64_t seed) {
    EnsembleSpec s;
    s.packets = p.packets;
    s.species = sp;
    s.grid = p.grid;
    s.units = p.u;
    s.prop = p.prop;
    s.members = p.members;
    s.n_steps = p.steps;
    s.record_stride = p.stride;
    s.track_count = p.tracks;
    s.seed = seed;
    return s;
}

} // namespace

int scenario_fig3(ScenarioIO& io) {
    FreePairParams p = read_free_pair(io, 0.12, 0.08);
    io.commit();
    warn_if_dt_coarse(io, p.u, p.packets, p.prop.dt);
    if (io.validate_only) {
        check_packets_on_grid(p.packets, p.grid);
        return 0;
    }
    auto res = run_shared_field_ensemble(to_spec(p, Species::Distinguishable, io.seed));
    write_energy_csv(io.path("energies.csv"), res.energies);
    const auto& last = res.energies.series.back();
    write_summary(io.path("summary.txt"),
                  {{"members", fmt(p.members)},
                   {"final_k1_ev", fmt(last.k_per_particle[0])},
                   {"final_k2_ev", fmt(last.k_per_particle[1])},
                   {"final_total_ev", fmt(last.total)}});
    return 0;
}

// ---------------------------------------------------------------- fig 6

int scenario_fig6(ScenarioIO& io) {
    FreePairParams p = read_free_pair(io, 0.12, 0.08, 24);
    io.commit();
    warn_if_dt_coarse(io, p.u, p.packets, p.prop.dt);
    if (io.validate_only) {
        check_packets_on_grid(p.packets, p.grid);
        return 0;
    }
    auto fermion = run_shared_field_ensemble(to_spec(p, Species::Fermion, io.seed));
    auto boson = run_shared_field_ensemble(to_spec(p, Species::Boson, io.seed + 1));
    write_tracks_csv(io.path("trajectories_fermion.csv"), fermion.tracks, 2);
    write_tracks_csv(io.path("trajectories_boson.csv"), boson.tracks, 2);
    const long flips = fermion.diagonal_sign_changes + boson.diagonal_sign_changes;
    write_summary(io.path("summary.txt"),
                  {{"members_per_species", fmt(p.members)},
                   {"fermion_sign_changes", fmt(fermion.diagonal_sign_changes)},
                   {"boson_sign_changes", fmt(boson.diagonal_sign_changes)},
                   {"fermion_min_distance_nm", fmt(fermion.min_pair_distance)},
                   {"boson_min_distance_nm", fmt(boson.min_pair_distance)}});
    return flips == 0 ? 0 : 2;
}

// ---------------------------------------------------------------- fig 7

namespace {

struct Dip {
    double value = 0.0, se = 0.0, time = 0.0;
};

// the per-particle curves are statistically identical for identical
// particles, so dips are read off their average
Dip kinetic_dip(const EnergyLedger::Result& r) {
    Dip d;
    d.value = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < r.series.size(); ++s) {
        const double k =
            0.5 * (r.series[s].k_per_particle[0] + r.series[s].k_per_particle[1]);
        if (k < d.value) {
            d.value = k;
            d.se = 0.5 * std::hypot(r.k_se[s][0], r.k_se[s][1]);
            d.time = r.series[s].time;
        }
    }
    return d;
}

// <K> at the instant the trajectory ensemble is closest to the diagonal:
// trajectories bounce before the wave packets fully overlap, so this exceeds
// the bare minimum of the <K> curve (which is just the centre-of-mass term)
Dip kinetic_at_closest_approach(const EnsembleResult& r) {
    Dip d;
    size_t best = 0;
    for (size_t s = 1; s < r.median_pair_distance.size(); ++s)
        if (r.median_pair_distance[s] < r.median_pair_distance[best]) best = s;
    d.value = 0.5 * (r.energies.series[best].k_per_particle[0] +
                     r.energies.series[best].k_per_particle[1]);
    d.se = 0.5 * std::hypot(r.energies.k_se[best][0], r.energies.k_se[best][1]);
    d.time = r.energies.series[best].time;
    return d;
}

} // namespace

int scenario_fig7(ScenarioIO& io) {
    FreePairParams p = read_free_pair(io, 0.12, 0.08);
    const Grid1D grid2d = read_grid(io.cfg, "grid2d", p.grid.x_min, p.grid.x_max, 2048);
    io.commit();
    warn_if_dt_coarse(io, p.u, p.packets, p.prop.dt);
    if (io.validate_only) {
        check_packets_on_grid(p.packets, p.grid);
        check_packets_on_grid(p.packets, grid2d);
        return 0;
    }
    Exact2DSpec base;
    base.p1 = p.packets[0];
    base.p2 = p.packets[1];
    base.grid = grid2d;
    base.units = p.u;
    base.prop = p.prop;
    base.members = p.members;
    base.n_steps = p.steps;
    base.record_stride = p.stride;
    Exact2DSpec fs = base;
    fs.species = Species::Fermion;
    fs.seed = io.seed;
    Exact2DSpec bs = base;
    bs.species = Species::Boson;
    bs.seed = io.seed + 1;
    auto fermion = run_exact_2d_ensemble(fs);
    auto boson = run_exact_2d_ensemble(bs);
    write_energy_csv(io.path("energies_fermion.csv"), fermion.energies);
    write_energy_csv(io.path("energies_boson.csv"), boson.energies);
    const Dip df = kinetic_dip(fermion.energies);
    const Dip db = kinetic_dip(boson.energies);
    const Dip cf = kinetic_at_closest_approach(fermion);
    const Dip cb = kinetic_at_closest_approach(boson);
    write_summary(io.path("summary.txt"),
                  {{"fermion_k_dip_ev", fmt(df.value)},
                   {"fermion_k_dip_se", fmt(df.se)},
                   {"fermion_k_dip_time_fs", fmt(df.time)},
                   {"boson_k_dip_ev", fmt(db.value)},
                   {"boson_k_dip_se", fmt(db.se)},
                   {"boson_k_dip_time_fs", fmt(db.time)},
                   {"fermion_k_closest_approach_ev", fmt(cf.value)},
                   {"fermion_k_closest_approach_se", fmt(cf.se)},
                   {"fermion_closest_approach_time_fs", fmt(cf.time)},
                   {"fermion_min_median_distance_nm",
                    fmt(*std::min_element(fermion.median_pair_distance.begin(),
                                          fermion.median_pair_distance.end()))},
                   {"boson_k_closest_approach_ev", fmt(cb.value)},
                   {"boson_k_closest_approach_se", fmt(cb.se)},
                   {"boson_closest_approach_time_fs", fmt(cb.time)},
                   {"boson_min_median_distance_nm",
                    fmt(*std::min_element(boson.median_pair_distance.begin(),
                                          boson.median_pair_distance.end()))},
                   {"fermion_sign_changes", fmt(fermion.diagonal_sign_changes)},
                   {"boson_sign_changes", fmt(boson.diagonal_sign_changes)}});
    return 0;
}

// ------------------------------------------------- figs 11/12 and 13/14

namespace {

struct HarmonicParams {
    UnitSystem u;
    std::vector<GaussianPacketSpec> packets;
    Grid1D grid;
    Grid1D grid2d;
    PropagatorConfig prop;
    double coupling;
    int steps, stride, members, tracks;
};

HarmonicParams read_harmonic(ScenarioIO& io) {
    HarmonicParams p;
    p.packets = {read_packet(io.cfg, "packet1", +50.0, 0.06, -1, 25.0, p.u),
                 read_packet(io.cfg, "packet2", -50.0, 0.04, +1, 25.0, p.u)};
    p.grid = read_grid(io.cfg, "grid", -512.0, 512.0, 1280);
    p.grid2d = read_grid(io.cfg, "grid2d", -512.0, 512.0, 1536);
    p.prop = read_prop(io.cfg, "run", 0.5);
    p.coupling = io.cfg.get_double("potential.c", 1e-6); // eV/nm^2
    p.steps = static_cast<int>(io.cfg.get_long("run.steps", 5000));
    p.stride = static_cast<int>(io.cfg.get_long("run.record_stride", 25));
    p.members = static_cast<int>(io.cfg.get_long("run.members", 4000));
    p.tracks = static_cast<int>(io.cfg.get_long("run.track_count", 0));
    return p;
}

struct AgreementStats {
    double rms_rel_k1 = 0.0, rms_rel_k2 = 0.0;
    double max_imbalance_sigma = 0.0; // max |k1-k2| / (3 se) over slots
};

AgreementStats compare_energies(const EnergyLedger::Result& test,
                                const EnergyLedger::Result& ref) {
    AgreementStats st;
    double num1 = 0.0, num2 = 0.0, den1 = 0.0, den2 = 0.0;
    const size_t n = std::min(test.series.size(), ref.series.size());
    for (size_t s = 0; s < n; ++s) {
        const double d1 = test.series[s].k_per_particle[0] - ref.series[s].k_per_particle[0];
        const double d2 = test.series[s].k_per_particle[1] - ref.series[s].k_per_particle[1];
        num1 += d1 * d1;
        num2 += d2 * d2;
        den1 += ref.series[s].k_per_particle[0] * ref.series[s].k_per_particle[0];
        den2 += ref.series[s].k_per_particle[1] * ref.series[s].k_per_particle[1];
        const double imb = std::abs(test.series[s].k_per_particle[0] -
                                    test.series[s].k_per_particle[1]);
        const double se = std::hypot(test.k_se[s][0], test.k_se[s][1]);
        if (se > 0) st.max_imbalance_sigma = std::max(st.max_imbalance_sigma, imb / se);
    }
    st.rms_rel_k1 = std::sqrt(num1 / std::max(den1, 1e-300));
    st.rms_rel_k2 = std::sqrt(num2 / std::max(den2, 1e-300));
    return st;
}

int run_harmonic_scenario(ScenarioIO& io, Species species) {
    HarmonicParams p = read_harmonic(io);
    io.commit();
    warn_if_dt_coarse(io, p.u, p.packets, p.prop.dt);
    if (io.validate_only) {
        check_packets_on_grid(p.packets, p.grid);
        check_packets_on_grid(p.packets, p.grid2d);
        return 0;
    }

    EnsembleSpec cs;
    cs.packets = p.packets;
    cs.species = species;
    cs.grid = p.grid;
    cs.units = p.u;
    cs.prop = p.prop;
    cs.members = p.members;
    cs.n_steps = p.steps;
    cs.record_stride = p.stride;
    cs.track_count = p.tracks;
    cs.seed = io.seed;
    cs.potential = std::make_shared<HarmonicPairPotential>(p.coupling);
    auto conditional = run_conditional_ensemble(cs);

    Exact2DSpec es;
    es.p1 = p.packets[0];
    es.p2 = p.packets[1];
    es.species = species;
    es.grid = p.grid2d;
    es.units = p.u;
    es.prop = p.prop;
    es.members = p.members;
    es.n_steps = p.steps;
    es.record_stride = p.stride;
    es.seed = io.seed; // same sampling stream family; fields differ anyway
    es.potential = std::make_shared<HarmonicCoupling2D>(p.coupling);
    auto exact = run_exact_2d_ensemble(es);

    write_energy_csv(io.path("energies_conditional.csv"), conditional.energies);
    write_energy_csv(io.path("energies_exact2d.csv"), exact.energies);
    const AgreementStats st = compare_energies(conditional.energies, exact.energies);
    write_summary(io.path("summary.txt"),
                  {{"species", species == Species::Fermion ? "fermion" : "distinguishable"},
                   {"members", fmt(p.members)},
                   {"rms_rel_k1", fmt(st.rms_rel_k1)},
                   {"rms_rel_k2", fmt(st.rms_rel_k2)},
                   {"max_k_imbalance_over_se", fmt(st.max_imbalance_sigma)},
                   {"conditional_sign_changes", fmt(conditional.diagonal_sign_changes)}});
    return 0;
}

} // namespace

int scenario_fig11_12(ScenarioIO& io) {
    return run_harmonic_scenario(io, Species::Distinguishable);
}

int scenario_fig13_14(ScenarioIO& io) {
    return run_harmonic_scenario(io, Species::Fermion);
}

// ------------------------------------------------------------ appendix B

int scenario_appendixB(ScenarioIO& io) {
    UnitSystem u;
    const double sigma = io.cfg.get_double("packets.sigma", 25.0);
    const double sep = io.cfg.get_double("packets.separation", 150.0);
    const double e0 = io.cfg.get_double("packets.e0", 0.05);
    const int n_points = static_cast<int>(io.cfg.get_long("scan.points", 400));
    io.commit();
    if (io.validate_only) return 0;

    auto make = [&](double shift) {
        return std::vector<GaussianPacketSpec>{
            GaussianPacketSpec::from_energy(-shift, e0, +1, sigma, u),
            GaussianPacketSpec::from_energy(0.0, e0, +1, sigma, u),
            GaussianPacketSpec::from_energy(+shift, e0, -1, sigma, u)};
    };

    CsvWriter csv(io.path("spin_check.csv"),
                  {"case", "x1_nm", "x2_nm", "x3_nm", "exact", "approx", "rel_diff"});
    Rng rng(io.seed);
    double max_rel_sep = 0.0, mean_rel_ovl = 0.0;
    for (int c = 0; c < 2; ++c) {
        const double shift = c == 0 ? sep : 0.5 * sigma * std::sqrt(2.0);
        auto packets = make(shift);
        for (int i = 0; i < n_points; ++i) {
            double x[3];
            for (int j = 0; j < 3; ++j)
                x[j] = packets[j].x0 + rng.normal() * sigma / std::sqrt(2.0);
            const auto r = spin_mixed_norm_check(packets[0], packets[1], packets[2],
                                                 x[0], x[1], x[2]);
            const double rel = std::abs(r.exact - r.approx) / std::max(r.exact, 1e-300);
            csv.row({static_cast<double>(c), x[0], x[1], x[2], r.exact, r.approx, rel});
            if (c == 0)
                max_rel_sep = std::max(max_rel_sep, rel);
            else
                mean_rel_ovl += rel / n_points;
        }
    }
    const double d_sep = sep / (sigma * std::sqrt(2.0));
    write_summary(io.path("summary.txt"),
                  {{"separated_pair_distance_d", fmt(d_sep)},
                   {"separated_max_rel_diff", fmt(max_rel_sep)},
                   {"overlapping_mean_rel_diff", fmt(mean_rel_ovl)}});
    return 0;
}

} // namespace bohmex
