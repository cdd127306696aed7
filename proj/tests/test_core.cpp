#include "doctest.h"

#include <cmath>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/gaussian_integrals.hpp"
#include "core/manybody.hpp"
#include "core/observables.hpp"
#include "core/sampling.hpp"
#include "support/stats.hpp"

using namespace bohmex;

namespace {

// CODATA-derived constants, computed once from hbar*c = 197.3269804 eV nm and
// m0 c^2 = 510998.95 eV and frozen here as the test oracle.
constexpr double kH2OverM0 = 0.0761996422767248;    // eV nm^2
constexpr double kK0For012eV = 1.7747171845696876;  // nm^-1

UnitSystem units() { return UnitSystem{}; }

} // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("unit system reproduces the frozen CODATA-derived constants") {
    UnitSystem u = units();
    CHECK(u.hbar2_over_m0 == doctest::Approx(kH2OverM0).epsilon(1e-14));
    CHECK(u.wavevector(0.12) == doctest::Approx(kK0For012eV).epsilon(1e-13));
    // consistency: hbar = hbar_c / c with c = 299.792458 nm/fs
    CHECK(u.hbar == doctest::Approx(197.3269804 / 299.792458).epsilon(1e-10));
}

TEST_CASE("packet sampling: unit norm and first moment") {
    UnitSystem u = units();
    Grid1D grid(-400.0, 400.0, 2048);
    auto spec = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    WaveField1D f = build_packet(spec, grid);
    CHECK(std::abs(f.norm() - 1.0) < 1e-8);
    f.normalize();
    CHECK(expectation_position_1d(f) == doctest::Approx(50.0).epsilon(1e-8));

    // k0 = 0: purely real up to the (here absent) global phase
    auto rest = GaussianPacketSpec::from_wavevector(0.0, 0.0, 25.0, u);
    WaveField1D fr = build_packet(rest, grid);
    double imag_max = 0.0;
    for (const auto& a : fr.amp) imag_max = std::max(imag_max, std::abs(a.imag()));
    CHECK(imag_max == 0.0);
}

TEST_CASE("packet grid clearance is enforced") {
    UnitSystem u = units();
    auto spec = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    CHECK_THROWS_AS(build_packet(spec, Grid1D(-400.0, 120.0, 1024)), GridTooNarrow);
}

TEST_CASE("analytic gaussian integrals against closed forms") {
    UnitSystem u = units();
    auto p1 = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.08, +1, 25.0, u);

    // diagonal kinetic element: E0 + hbar^2/(4 m sigma^2)
    const double t11 = gaussian_kinetic(p1, p1, u).real();
    CHECK(t11 == doctest::Approx(0.12 + kH2OverM0 / (4 * 625.0)).epsilon(1e-12));
    CHECK(gaussian_overlap(p1, p1).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gaussian_position(p1, p1).real() == doctest::Approx(50.0).epsilon(1e-12));

    // |<1|2>| = exp(-d^2/2) for equal widths
    const double d = phase_space_distance(p1, p2);
    CHECK(std::abs(gaussian_overlap(p1, p2)) ==
          doctest::Approx(std::exp(-0.5 * d * d)).epsilon(1e-10));
}

TEST_CASE("phase-space distance identities and the paper arrangement") {
    UnitSystem u = units();
    auto p1 = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.08, +1, 25.0, u);
    CHECK(phase_space_distance(p1, p1) == 0.0);

    auto q1 = GaussianPacketSpec::from_wavevector(0.0, 0.4, 25.0, u);
    auto q2 = GaussianPacketSpec::from_wavevector(50.0, 0.4, 25.0, u);
    CHECK(phase_space_distance(q1, q2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // the free-pair arrangement (dx = 100 nm, dE = 0.04 eV) sits far outside
    // the exchange-active region whichever way the momenta point
    auto c1 = GaussianPacketSpec::from_energy(50.0, 0.12, +1, 25.0, u);
    auto c2 = GaussianPacketSpec::from_energy(-50.0, 0.08, +1, 25.0, u);
    CHECK(phase_space_distance(c1, c2) == doctest::Approx(6.414309704827451).epsilon(1e-12));
    CHECK(phase_space_distance(c1, c2) > 2.0);
    CHECK(phase_space_distance(p1, p2) > 2.0); // counter-propagating variant

    auto wide = GaussianPacketSpec::from_wavevector(0.0, 0.4, 30.0, u);
    CHECK_THROWS_AS(phase_space_distance(q1, wide), MixedWidths);
}

TEST_CASE("two-particle builder: species symmetry and degeneracy guard") {
    UnitSystem u = units();
    Grid1D grid(-400.0, 400.0, 1024);
    auto p1 = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.08, +1, 25.0, u);

    WaveField2D fer = build_manybody_2d(p1, p2, Species::Fermion, grid, grid);
    const double mx = fer.max_abs();
    double diag = 0.0, anti = 0.0;
    for (int i = 0; i < grid.n; i += 7) {
        diag = std::max(diag, std::abs(fer.at(i, i)));
        for (int j = 0; j < grid.n; j += 59)
            anti = std::max(anti, std::abs(fer.at(i, j) + fer.at(j, i)));
    }
    CHECK(diag <= 1e-10 * mx);
    CHECK(anti <= 1e-12 * mx);

    WaveField2D bos = build_manybody_2d(p1, p2, Species::Boson, grid, grid);
    double sym = 0.0;
    for (int i = 0; i < grid.n; i += 7)
        for (int j = 0; j < grid.n; j += 59)
            sym = std::max(sym, std::abs(bos.at(i, j) - bos.at(j, i)));
    CHECK(sym <= 1e-12 * bos.max_abs());

    // identical packets: bosons collapse to the product, fermions are illegal
    WaveField2D prod = build_manybody_2d(p1, p1, Species::Distinguishable, grid, grid);
    WaveField2D bos2 = build_manybody_2d(p1, p1, Species::Boson, grid, grid);
    double dmax = 0.0;
    for (int i = 0; i < grid.n; i += 13)
        for (int j = 0; j < grid.n; j += 17)
            dmax = std::max(dmax, std::abs(prod.at(i, j) - bos2.at(i, j)));
    CHECK(dmax < 1e-10);
    CHECK_THROWS_AS(build_manybody_2d(p1, p1, Species::Fermion, grid, grid),
                    DegenerateState);
}

TEST_CASE("ensemble kinetic energy: single packet and permutation invariance") {
    UnitSystem u = units();
    auto p = GaussianPacketSpec::from_energy(0.0, 0.12, 1, 25.0, u);
    const double t = ensemble_kinetic_energy({p}, Species::Fermion, u);
    CHECK(t == doctest::Approx(0.12 + kH2OverM0 / (4 * 625.0)).epsilon(1e-12));

    std::vector<GaussianPacketSpec> ps = {
        GaussianPacketSpec::from_wavevector(-40.0, 0.1, 25.0, u),
        GaussianPacketSpec::from_wavevector(0.0, 0.25, 25.0, u),
        GaussianPacketSpec::from_wavevector(40.0, 0.45, 25.0, u)};
    const double t0 = ensemble_kinetic_energy(ps, Species::Boson, u);
    std::swap(ps[0], ps[1]);
    std::swap(ps[1], ps[2]);
    CHECK(ensemble_kinetic_energy(ps, Species::Boson, u) ==
          doctest::Approx(t0).epsilon(1e-11));

    CHECK_THROWS_AS(ensemble_kinetic_energy(std::vector<GaussianPacketSpec>(7, p),
                                            Species::Fermion, u),
                    TooManyParticles);
}

TEST_CASE("exchange energy vanishes for separated packets, grows for close ones") {
    UnitSystem u = units();
    const double sigma = 25.0, sk = 1.0 / sigma;
    auto arrangement = [&](double d) {
        const double h = sigma * d / std::sqrt(2.0);
        const double dk = sk * d / std::sqrt(2.0);
        return std::vector<GaussianPacketSpec>{
            GaussianPacketSpec::from_wavevector(0.0, 0.0, sigma, u),
            GaussianPacketSpec::from_wavevector(-h, dk, sigma, u),
            GaussianPacketSpec::from_wavevector(+h, dk, sigma, u)};
    };
    // far apart (d = 6): identical to three distinguishable particles
    {
        auto ps = arrangement(6.0);
        const double tf = ensemble_kinetic_energy(ps, Species::Fermion, u);
        const double td = ensemble_kinetic_energy(ps, Species::Distinguishable, u);
        CHECK(std::abs(tf - td) / td < 1e-3);
    }
    // two-packet cross-check of the machinery against a dense-grid quadrature
    {
        auto p1 = GaussianPacketSpec::from_wavevector(-12.0, 0.05, 25.0, u);
        auto p2 = GaussianPacketSpec::from_wavevector(12.0, 0.08, 25.0, u);
        const double tf = ensemble_kinetic_energy({p1, p2}, Species::Fermion, u);
        Grid1D g(-300.0, 300.0, 1536);
        WaveField2D f = build_manybody_2d(p1, p2, Species::Fermion, g, g);
        const double tq = expectation_kinetic_2d(f, 0, u, PropagatorConfig::Kinetic::Compact4) +
                          expectation_kinetic_2d(f, 1, u, PropagatorConfig::Kinetic::Compact4);
        CHECK(tf == doctest::Approx(tq).epsilon(2e-3));
    }
    // Pauli rise at short distance
    {
        auto close_f = ensemble_kinetic_energy(arrangement(0.5), Species::Fermion, u);
        auto close_d =
            ensemble_kinetic_energy(arrangement(0.5), Species::Distinguishable, u);
        CHECK(close_f > close_d * 1.05);
    }
}

TEST_CASE("mixed-spin norm: factorization limit and antisymmetry node") {
    UnitSystem u = units();
    auto far1 = GaussianPacketSpec::from_energy(-150.0, 0.05, 1, 25.0, u);
    auto far2 = GaussianPacketSpec::from_energy(0.0, 0.05, 1, 25.0, u);
    auto far3 = GaussianPacketSpec::from_energy(150.0, 0.05, -1, 25.0, u);

    Rng rng(7);
    double max_rel = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x1 = -150.0 + rng.normal() * 25.0 / std::sqrt(2.0);
        const double x2 = 0.0 + rng.normal() * 25.0 / std::sqrt(2.0);
        const double x3 = 150.0 + rng.normal() * 25.0 / std::sqrt(2.0);
        const auto r = spin_mixed_norm_check(far1, far2, far3, x1, x2, x3);
        CHECK(r.exact >= -1e-18);
        CHECK(r.approx >= -1e-18);
        max_rel = std::max(max_rel, std::abs(r.exact - r.approx) / r.exact);
    }
    CHECK(max_rel < 1e-3);

    // x2 = x3: the down-spin block is antisymmetric, both forms vanish
    const auto node = spin_mixed_norm_check(far1, far2, far3, -140.0, 20.0, 20.0);
    CHECK(std::abs(node.exact) < 1e-20);
    CHECK(std::abs(node.approx) < 1e-20);

    // overlapping packets: the discrepancy is real and reportable
    auto near2 = GaussianPacketSpec::from_energy(-17.7, 0.05, 1, 25.0, u);
    auto near3 = GaussianPacketSpec::from_energy(17.7, 0.05, -1, 25.0, u);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x1 = -17.7 + rng.normal() * 17.7;
        const double x2 = rng.normal() * 17.7;
        const double x3 = 17.7 + rng.normal() * 17.7;
        const auto r = spin_mixed_norm_check(near2, far2, near3, x1, x2, x3);
        if (r.exact > 1e-12)
            worst = std::max(worst, std::abs(r.exact - r.approx) / r.exact);
    }
    CHECK(worst > 1e-3); // the factorization visibly breaks down
}

TEST_CASE("1d sampling: moments, KS test, narrow packet") {
    UnitSystem u = units();
    Grid1D grid(-400.0, 400.0, 2048);
    auto spec = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();

    const int m = 100000;
    auto xs = sample_positions_1d(f, m, 42);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= m;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= m;
    const double sig = 25.0 / std::sqrt(2.0);
    CHECK(std::abs(mean - 50.0) < 4.0 * 25.0 / std::sqrt(2.0 * m));
    CHECK(std::abs(std::sqrt(var) - sig) < 0.02 * sig);

    // KS against the exact normal cdf of |psi|^2
    const double d = teststats::ks_statistic(xs, [&](double x) {
        return 0.5 * std::erfc(-(x - 50.0) / (sig * std::sqrt(2.0)));
    });
    CHECK(d < teststats::ks_critical_001(m));

    // delta-like packet: everything lands within one cell of the center
    auto narrow = GaussianPacketSpec::from_wavevector(10.0, 0.0, 0.05, u);
    Grid1D fine(9.0, 11.0, 4096);
    WaveField1D nf = build_packet(narrow, fine);
    nf.normalize();
    auto ns = sample_positions_1d(nf, 2000, 7);
    for (double x : ns) CHECK(std::abs(x - 10.0) < 0.35);

    WaveField1D bad = f;
    for (auto& a : bad.amp) a *= 1.2;
    CHECK_THROWS_AS(sample_positions_1d(bad, 10, 1), NotNormalized);
}

TEST_CASE("2d sampling respects the fermion diagonal node") {
    UnitSystem u = units();
    // the grid must resolve the relative-momentum oscillation (k_rel ~ 3.2/nm)
    // or near-diagonal density is spuriously inflated
    Grid1D grid(-300.0, 300.0, 2048);
    auto p1 = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.08, +1, 25.0, u);
    WaveField2D f = build_manybody_2d(p1, p2, Species::Fermion, grid, grid);
    auto ss = sample_positions_2d(f, 100000, 9);
    long in_band = 0;
    const double band = grid.dx() / 2.0;
    for (const auto& s : ss)
        if (std::abs(s.x1 - s.x2) < band) ++in_band;
    CHECK(in_band == 0);

    // marginal mean splits between the two packet centres
    double m1 = 0.0;
    for (const auto& s : ss) m1 += s.x1;
    m1 /= ss.size();
    CHECK(std::abs(m1) < 2.0);
}

TEST_CASE("metropolis sampler tracks the symmetrized density") {
    UnitSystem u = units();
    std::vector<GaussianPacketSpec> ps = {
        GaussianPacketSpec::from_wavevector(-60.0, 0.1, 25.0, u),
        GaussianPacketSpec::from_wavevector(0.0, 0.2, 25.0, u),
        GaussianPacketSpec::from_wavevector(60.0, 0.3, 25.0, u)};
    auto samples = sample_symmetrized_metropolis(ps, Species::Fermion, 400, 11);
    REQUIRE(samples.size() == 400);
    // the three coordinates are exchangeable; each mean is near zero
    double mean = 0.0;
    for (const auto& s : samples)
        for (double x : s) mean += x;
    mean /= 3.0 * samples.size();
    CHECK(std::abs(mean) < 10.0);
}

TEST_CASE("config parser: types, lists, unknown keys, duplicates") {
    const char* text =
        "# comment\n"
        "[scenario]\n"
        "name = fig3_free_distinguishable\n"
        "seed = 7\n"
        "[run]\n"
        "members = 200\n"
        "dt = 0.25\n"
        "flags = 0.0, 0.05, 0.1\n"
        "verbose = true\n";
    Config cfg = Config::parse_string(text, "test");
    CHECK(cfg.require_string("scenario.name") == "fig3_free_distinguishable");
    CHECK(cfg.get_long("scenario.seed", 0) == 7);
    CHECK(cfg.get_double("run.dt", 0.0) == doctest::Approx(0.25));
    CHECK(cfg.get_bool("run.verbose", false));
    CHECK(cfg.get_double_list("run.flags", {}).size() == 3);
    CHECK_THROWS_AS(cfg.reject_unknown(), ConfigError); // run.members unread
    CHECK(cfg.get_long("run.members", 0) == 200);
    CHECK_NOTHROW(cfg.reject_unknown());

    CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n", "dup"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("nonsense line\n", "bad"), ConfigError);
    Config typo = Config::parse_string("x = notanumber\n", "typo");
    CHECK_THROWS_AS(typo.get_double("x", 0.0), ConfigError);
}

TEST_SUITE_END();
