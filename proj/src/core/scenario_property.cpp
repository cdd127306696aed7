#include <cmath>
#include <cstdio>

#include "core/errors.hpp"
#include "core/observables.hpp"
#include "core/scenario_internal.hpp"

namespace bohmex {

namespace {

struct PropertyReport {
    std::vector<std::string> lines;
    int failures = 0;
    void check(const std::string& name, bool ok, const std::string& detail) {
        lines.push_back(std::string(ok ? "pass" : "FAIL") + "  " + name +
                        (detail.empty() ? "" : "  (" + detail + ")"));
        if (!ok) ++failures;
    }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

} // namespace

// A fast battery of the module invariants, runnable from the CLI. The full
// evidence lives in the test suite; this is the field diagnostic.
int scenario_property_suite(ScenarioIO& io) {
    io.commit();
    if (io.validate_only) return 0;

    PropertyReport rep;
    UnitSystem u;
    const Grid1D grid(-200.0, 200.0, 512);
    PropagatorConfig prop;
    prop.dt = 0.1;

    // packet normalization and symmetrization signs
    {
        auto p1 = GaussianPacketSpec::from_energy(-40.0, 0.05, +1, 20.0, u);
        auto p2 = GaussianPacketSpec::from_energy(+40.0, 0.03, -1, 20.0, u);
        auto f = build_packet(p1, grid);
        rep.check("packet_unit_norm", std::abs(f.norm() - 1.0) < 1e-8,
                  num(std::abs(f.norm() - 1.0)));

        auto fer = build_manybody_2d(p1, p2, Species::Fermion, grid, grid);
        double worst = 0.0;
        for (int i = 0; i < grid.n; i += 37)
            for (int j = 0; j < grid.n; j += 41)
                worst = std::max(worst, std::abs(fer.at(i, j) + fer.at(j, i)));
        rep.check("fermion_antisymmetry", worst <= 1e-12 * fer.max_abs(), num(worst));
    }

    // phase-space distance identities
    {
        auto p1 = GaussianPacketSpec::from_wavevector(0.0, 0.3, 25.0, u);
        auto p2 = GaussianPacketSpec::from_wavevector(50.0, 0.3, 25.0, u);
        const double d = phase_space_distance(p1, p2);
        rep.check("distance_two_sigma_offset",
                  std::abs(d - std::sqrt(2.0)) < 1e-12, num(d));
        rep.check("distance_symmetry",
                  phase_space_distance(p2, p1) == d, "");
    }

    // permutation invariance of the ensemble kinetic energy
    {
        std::vector<GaussianPacketSpec> ps = {
            GaussianPacketSpec::from_wavevector(-30.0, 0.2, 25.0, u),
            GaussianPacketSpec::from_wavevector(0.0, 0.35, 25.0, u),
            GaussianPacketSpec::from_wavevector(30.0, 0.5, 25.0, u)};
        const double t1 = ensemble_kinetic_energy(ps, Species::Fermion, u);
        std::swap(ps[0], ps[2]);
        const double t2 = ensemble_kinetic_energy(ps, Species::Fermion, u);
        rep.check("kinetic_permutation_invariance", std::abs(t1 - t2) < 1e-10 * t1,
                  num(std::abs(t1 - t2)));
    }

    // cofactor engine consistency on random matrices
    {
        Rng rng(io.seed);
        double worst = 0.0;
        for (int n = 2; n <= 5; ++n) {
            std::vector<cplx> t(n * n), a(n * n), ref(n * n);
            for (auto& v : t) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
            for (auto sp : {Species::Fermion, Species::Boson}) {
                cofactor_matrix(t.data(), n, sp, a.data());
                cofactor_matrix_reference(t.data(), n, sp, ref.data());
                for (int i = 0; i < n * n; ++i)
                    worst = std::max(worst, std::abs(a[i] - ref[i]));
            }
        }
        rep.check("cofactor_engine_vs_reference", worst < 1e-12, num(worst));
    }

    // unitarity over a short run
    {
        auto p1 = GaussianPacketSpec::from_energy(-40.0, 0.05, +1, 20.0, u);
        auto f = build_packet(p1, grid);
        Propagator1D pr(grid, u, prop);
        std::vector<double> v(grid.n, 0.0);
        for (int s = 0; s < 400; ++s) pr.step(f, v);
        rep.check("norm_drift_1d", std::abs(f.norm() - 1.0) < 400 * 1e-10,
                  num(std::abs(f.norm() - 1.0)));
    }

    // swap symmetry of the exchange algorithm, N = 2 harmonic
    {
        std::vector<GaussianPacketSpec> ps = {
            GaussianPacketSpec::from_energy(40.0, 0.05, -1, 20.0, u),
            GaussianPacketSpec::from_energy(-40.0, 0.03, +1, 20.0, u)};
        auto pot = std::make_shared<HarmonicPairPotential>(1e-6);
        auto repo = swap_symmetry_check(ps, Species::Fermion, grid, u, prop, pot,
                                        {30.0, -25.0}, 0, 1, 300);
        rep.check("swap_symmetry_n2", repo.pass, num(repo.max_rel_deviation));
    }

    // separable limit: assembled conditional equals the packet Slater slice
    {
        std::vector<GaussianPacketSpec> ps = {
            GaussianPacketSpec::from_energy(40.0, 0.05, -1, 20.0, u),
            GaussianPacketSpec::from_energy(-40.0, 0.03, +1, 20.0, u)};
        ConditionalDynamics dyn(ps, Species::Fermion, grid, u, prop,
                                std::make_shared<FreePotential>(), {35.0, -30.0});
        for (int s = 0; s < 200; ++s) dyn.step();
        const auto psi1 = dyn.assemble_conditional(0);
        // reference: exact symmetrized value with x2 frozen at its trajectory
        WaveField1D ref(grid);
        const double x2 = dyn.positions()[1];
        for (int i = 0; i < grid.n; ++i) {
            // single-packet free propagation is what the shared fields hold;
            // evaluate the determinant from those fields directly
            const auto& f11 = dyn.raw_field(0, 0);
            const auto& f22 = dyn.raw_field(1, 1);
            const auto st = LagrangeStencil::at(grid, x2);
            ref.amp[i] = f11.amp[i] * st.value(f22.amp.data()) -
                         dyn.raw_field(1, 0).amp[i] * st.value(dyn.raw_field(0, 1).amp.data());
        }
        ref.normalize();
        double worst = 0.0;
        // global phase may differ; compare against the phase-aligned reference
        cplx phase(0, 0);
        for (int i = 0; i < grid.n; ++i) phase += std::conj(ref.amp[i]) * psi1.amp[i];
        phase /= std::abs(phase);
        for (int i = 0; i < grid.n; ++i)
            worst = std::max(worst, std::abs(psi1.amp[i] - phase * ref.amp[i]));
        rep.check("separable_assembly_matches_slater_slice", worst < 1e-8, num(worst));
    }

    // quantum-equilibrium sampler against the density
    {
        auto p1 = GaussianPacketSpec::from_energy(0.0, 0.02, +1, 20.0, u);
        auto f = build_packet(p1, grid);
        f.normalize();
        auto xs = sample_positions_1d(f, 20000, io.seed + 5);
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= xs.size();
        const double sig = 20.0 / std::sqrt(2.0);
        rep.check("sampler_moments",
                  std::abs(mean) < 4.0 * sig / std::sqrt(20000.0) &&
                      std::abs(std::sqrt(var) - sig) < 0.02 * sig,
                  "mean " + num(mean) + ", std " + num(std::sqrt(var)));
    }

    std::FILE* fp = std::fopen(io.path("report.txt").c_str(), "wb");
    if (!fp) throw Error("cannot write property report");
    for (const auto& l : rep.lines) std::fprintf(fp, "%s\n", l.c_str());
    std::fprintf(fp, "%d failure(s)\n", rep.failures);
    std::fclose(fp);
    for (const auto& l : rep.lines) std::printf("%s\n", l.c_str());
    return rep.failures == 0 ? 0 : 2;
}

} // namespace bohmex
