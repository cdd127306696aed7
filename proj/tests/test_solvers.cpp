#include "doctest.h"

#include <cmath>

#include "core/errors.hpp"
#include "core/manybody.hpp"
#include "core/observables.hpp"
#include "core/propagate.hpp"

using namespace bohmex;

namespace {

UnitSystem units() { return UnitSystem{}; }

// free-Gaussian spread factor sigma(t)/sigma(0) = sqrt(1 + (hbar t / m s^2)^2)
double spread(double t, double sigma, const UnitSystem& u) {
    const double r = u.hbar2_over_m() * t / (u.hbar * sigma * sigma);
    return std::sqrt(1.0 + r * r);
}

} // namespace

TEST_SUITE_BEGIN("solvers");

TEST_CASE("free gaussian dispersion follows the analytic variance law") {
    UnitSystem u = units();
    Grid1D grid(-400.0, 400.0, 2048);
    auto spec = GaussianPacketSpec::from_wavevector(0.0, 0.0, 25.0, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();

    PropagatorConfig cfg;
    cfg.dt = 0.1;
    Propagator1D prop(grid, u, cfg);
    std::vector<double> v(grid.n, 0.0);
    for (int s = 0; s < 1000; ++s) prop.step(f, v);

    const double t = 1000 * cfg.dt;
    const double var_expect = 0.5 * 625.0 * spread(t, 25.0, u) * spread(t, 25.0, u);
    CHECK(variance_position_1d(f) == doctest::Approx(var_expect).epsilon(5e-3));
    CHECK(std::abs(f.norm() - 1.0) < 1000 * 1e-10);
}

TEST_CASE("constant potential is a pure phase") {
    UnitSystem u = units();
    Grid1D grid(-200.0, 200.0, 512);
    auto spec = GaussianPacketSpec::from_wavevector(0.0, 0.4, 20.0, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();
    WaveField1D f0 = f;

    PropagatorConfig cfg;
    cfg.dt = 0.05;
    Propagator1D prop(grid, u, cfg);
    const double v0 = 0.05;
    std::vector<double> v(grid.n, v0);
    WaveField1D free_f = f;
    std::vector<double> zeros(grid.n, 0.0);
    const int steps = 10;
    for (int s = 0; s < steps; ++s) {
        prop.step(f, v);
        prop.step(free_f, zeros);
    }
    // a constant only adds the global phase exp(-i V0 dt/hbar) per step;
    // Crank-Nicolson reproduces it to its O(dt^3) phase accuracy
    const double phi = -v0 * cfg.dt * steps / u.hbar;
    const cplx c(std::cos(phi), std::sin(phi));
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i)
        worst = std::max(worst, std::abs(f.amp[i] - c * free_f.amp[i]));
    CHECK(worst < steps * 5e-9);
    CHECK(std::abs(f.norm() - 1.0) < 1e-12);
    (void)f0;
}

TEST_CASE("frozen harmonic pair: coherent packet oscillates at sqrt(2c/m)") {
    UnitSystem u = units();
    const double c = 1e-4; // eV/nm^2, stiff enough for a short test
    const double omega = std::sqrt(2.0 * c / u.mass());
    // minimum-uncertainty packet of the matching well: sigma^2 = hbar/(m w)
    const double sigma = std::sqrt(u.hbar / (u.mass() * omega));
    Grid1D grid(-150.0, 150.0, 1024);
    auto spec = GaussianPacketSpec::from_wavevector(25.0, 0.0, sigma, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();

    PropagatorConfig cfg;
    cfg.dt = 0.25;
    Propagator1D prop(grid, u, cfg);
    HarmonicPairPotential pot(c);
    const double other = 0.0;
    PotentialContext ctx{std::span<const double>(&other, 1), {}, 0.0};

    // find the first return of <x> to (near) its initial value
    const double period = 2.0 * constants::pi / omega;
    const int steps = static_cast<int>(std::lround(period / cfg.dt));
    double max_dev = 0.0;
    for (int s = 0; s < steps; ++s) prop.step(f, pot, ctx);
    const double x_back = expectation_position_1d(f);
    max_dev = std::abs(x_back - 25.0);
    // one percent of the oscillation amplitude after one period
    CHECK(max_dev < 0.01 * 50.0);
}

TEST_CASE("time reversal: dt then -dt returns the state") {
    UnitSystem u = units();
    Grid1D grid(-200.0, 200.0, 512);
    auto spec = GaussianPacketSpec::from_wavevector(-20.0, 0.5, 20.0, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();
    WaveField1D f0 = f;

    PropagatorConfig fwd;
    fwd.dt = 0.1;
    PropagatorConfig bwd;
    bwd.dt = -0.1;
    Propagator1D pf(grid, u, fwd);
    std::vector<double> v(grid.n);
    for (int i = 0; i < grid.n; ++i) v[i] = 1e-4 * grid.x(i) * grid.x(i) * 0.01;
    for (int s = 0; s < 50; ++s) pf.step(f, v);
    // backward: same Cayley with negated dt
    Propagator1D pb(grid, u, bwd);
    for (int s = 0; s < 50; ++s) pb.step(f, v);
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) worst = std::max(worst, std::abs(f.amp[i] - f0.amp[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("grid refinement improves the free-packet solution by >= 3x") {
    UnitSystem u = units();
    auto run_error = [&](int n, double dt) {
        Grid1D grid(-300.0, 300.0, n);
        auto spec = GaussianPacketSpec::from_wavevector(-50.0, 0.9, 18.0, u);
        WaveField1D f = build_packet(spec, grid);
        f.normalize();
        PropagatorConfig cfg;
        cfg.dt = dt;
        cfg.kinetic = PropagatorConfig::Kinetic::Fd3; // test the second-order path
        Propagator1D prop(grid, u, cfg);
        std::vector<double> v(grid.n, 0.0);
        const double t_end = 60.0;
        const int steps = static_cast<int>(std::lround(t_end / dt));
        for (int s = 0; s < steps; ++s) prop.step(f, v);
        // analytic free evolution of the same packet
        const double sig = 18.0, k0 = 0.9, x0 = -50.0;
        const double hbar_m = u.hbar2_over_m() / u.hbar;
        double err = 0.0;
        const cplx iu(0.0, 1.0);
        const double a = u.hbar * t_end / (u.mass() * sig * sig);
        for (int i = 0; i < grid.n; i += 3) {
            const double x = grid.x(i);
            // standard dispersive Gaussian
            const cplx denom = 1.0 + iu * a;
            const double xc = x - x0 - hbar_m * k0 * t_end;
            const cplx arg = -xc * xc / (2.0 * sig * sig * denom) +
                             iu * (k0 * (x - x0) - 0.5 * hbar_m * k0 * k0 * t_end);
            const cplx ref = std::pow(constants::pi * sig * sig, -0.25) / std::sqrt(denom) *
                             std::exp(arg) *
                             std::exp(iu * k0 * x0);
            err = std::max(err, std::abs(f.amp[i] - ref));
        }
        return err;
    };
    const double coarse = run_error(768, 0.2);
    const double fine = run_error(1536, 0.1);
    CHECK(coarse / fine >= 3.0);
}

TEST_CASE("CAP absorbs an outgoing packet with tiny reflection") {
    UnitSystem u = units();
    Grid1D grid(-300.0, 300.0, 2048);
    auto spec = GaussianPacketSpec::from_wavevector(0.0, 2.0, 20.0, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();

    PropagatorConfig cfg;
    cfg.dt = 0.2;
    cfg.boundary.kind = BoundaryConfig::Kind::Cap;
    cfg.boundary.cap_width = 60.0;
    cfg.boundary.cap_strength = 0.3;
    Propagator1D prop(grid, u, cfg);
    std::vector<double> v(grid.n, 0.0);
    // v = 0.23 nm/fs: 1600 fs carries the packet deep into the absorber and
    // leaves whatever reflected inside the box
    for (int s = 0; s < 8000; ++s) prop.step(f, v);
    double remaining = 0.0;
    for (int i = 0; i < grid.n; ++i)
        if (std::abs(grid.x(i)) < 200.0) remaining += std::norm(f.amp[i]);
    remaining *= grid.dx();
    CHECK(remaining < 1e-4);
}

TEST_CASE("2d separable potential factorizes into two 1d runs") {
    UnitSystem u = units();
    Grid1D grid(-200.0, 200.0, 384);
    auto p1 = GaussianPacketSpec::from_wavevector(40.0, -0.35, 22.0, u);
    auto p2 = GaussianPacketSpec::from_wavevector(-40.0, 0.3, 22.0, u);

    WaveField2D f2 = build_manybody_2d(p1, p2, Species::Distinguishable, grid, grid);
    WaveField1D f1a = build_packet(p1, grid);
    WaveField1D f1b = build_packet(p2, grid);
    f1a.normalize();
    f1b.normalize();

    PropagatorConfig cfg;
    cfg.dt = 0.1;
    auto va = std::make_shared<LinearRampPotential>(0.04, 60.0);
    auto vb = std::make_shared<FreePotential>();
    PotentialContext ctx{{}, {}, 0.0};

    Propagator2D prop2(grid, grid, u, cfg);
    SeparablePotential2D pot2(va, vb);
    Propagator1D prop1(grid, u, cfg);

    for (int s = 0; s < 40; ++s) {
        prop2.step(f2, pot2);
        prop1.step(f1a, *va, ctx);
        prop1.step(f1b, *vb, ctx);
    }
    double worst = 0.0;
    for (int i = 0; i < grid.n; i += 3)
        for (int j = 0; j < grid.n; j += 3)
            worst = std::max(worst, std::abs(f2.at(i, j) - f1a.amp[i] * f1b.amp[j]));
    CHECK(worst < 40 * 1e-8); // 1e-8 per step
}

TEST_CASE("2d harmonic coupling: unitarity, antisymmetry, energy conservation") {
    UnitSystem u = units();
    Grid1D grid(-250.0, 250.0, 512);
    auto p1 = GaussianPacketSpec::from_energy(50.0, 0.06, -1, 25.0, u);
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.04, +1, 25.0, u);
    WaveField2D f = build_manybody_2d(p1, p2, Species::Fermion, grid, grid);

    PropagatorConfig cfg;
    cfg.dt = 0.25;
    Propagator2D prop(grid, grid, u, cfg);
    HarmonicCoupling2D pot(1e-6);

    const double e0 = expectation_hamiltonian_2d(f, pot, u, cfg.kinetic);
    double worst_norm = 0.0;
    for (int s = 0; s < 400; ++s) {
        prop.step(f, pot);
        worst_norm = std::max(worst_norm, std::abs(f.norm() - 1.0));
    }
    CHECK(worst_norm < 400 * 1e-9);

    // the alternating-direction ordering commutes with the particle swap
    // only up to the O(dt^3) splitting error, so antisymmetry drifts at
    // that order with the coupling on
    double anti = 0.0;
    for (int i = 0; i < grid.n; i += 5)
        for (int j = 0; j < grid.n; j += 11)
            anti = std::max(anti, std::abs(f.at(i, j) + f.at(j, i)));
    CHECK(anti < 400 * 2e-10);

    const double e1 = expectation_hamiltonian_2d(f, pot, u, cfg.kinetic);
    CHECK(std::abs(e1 - e0) / e0 < 1e-3);
}

TEST_CASE("2d free fermion antisymmetry is preserved exactly") {
    UnitSystem u = units();
    Grid1D grid(-250.0, 250.0, 512);
    auto p1 = GaussianPacketSpec::from_energy(50.0, 0.06, -1, 25.0, u);
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.04, +1, 25.0, u);
    WaveField2D f = build_manybody_2d(p1, p2, Species::Fermion, grid, grid);
    PropagatorConfig cfg;
    cfg.dt = 0.25;
    Propagator2D prop(grid, grid, u, cfg);
    SeparablePotential2D pot(std::make_shared<FreePotential>(),
                             std::make_shared<FreePotential>());
    for (int s = 0; s < 2000; ++s) prop.step(f, pot);
    double anti = 0.0;
    for (int i = 0; i < grid.n; i += 3)
        for (int j = 0; j < grid.n; j += 7)
            anti = std::max(anti, std::abs(f.at(i, j) + f.at(j, i)));
    CHECK(anti < 1e-10);
}

TEST_CASE("kinetic expectation matches the analytic packet moment") {
    UnitSystem u = units();
    Grid1D grid(-400.0, 400.0, 2048);
    auto spec = GaussianPacketSpec::from_energy(50.0, 0.12, -1, 25.0, u);
    WaveField1D f = build_packet(spec, grid);
    f.normalize();
    const double expect = 0.12 + u.hbar2_over_m() / (4.0 * 625.0);
    const double t = expectation_kinetic_1d(f, u, PropagatorConfig::Kinetic::Compact4);
    CHECK(t == doctest::Approx(expect).epsilon(1e-3)); // 0.1%

    // two-packet product state: total kinetic = 0.2 eV to half a percent
    auto p2 = GaussianPacketSpec::from_energy(-50.0, 0.08, +1, 25.0, u);
    Grid1D g2(-400.0, 400.0, 1024);
    WaveField2D f2 = build_manybody_2d(spec, p2, Species::Distinguishable, g2, g2);
    const double t2 =
        expectation_kinetic_2d(f2, 0, u, PropagatorConfig::Kinetic::Compact4) +
        expectation_kinetic_2d(f2, 1, u, PropagatorConfig::Kinetic::Compact4);
    CHECK(t2 == doctest::Approx(0.2).epsilon(5e-3));

    WaveField1D bad = f;
    for (auto& a : bad.amp) a *= 2.0;
    CHECK_THROWS_AS(expectation_kinetic_1d(bad, u, PropagatorConfig::Kinetic::Fd3),
                    NotNormalized);
}

TEST_SUITE_END();
