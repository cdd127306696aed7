#include "core/sampling.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace bohmex {

namespace {

// Inverse-CDF sampler over a piecewise-linear (trapezoid) density given by
// nonnegative samples w_i at uniform nodes. Works with unnormalized weights.
class TrapezoidSampler {
  public:
    TrapezoidSampler(const double* w, int n, double x_min, double dx)
        : w_(w), n_(n), x_min_(x_min), dx_(dx), cdf_(n, 0.0) {
        double c = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            c += 0.5 * (w_[i] + w_[i + 1]) * dx_;
            cdf_[i + 1] = c;
        }
        total_ = c;
    }

    double total() const { return total_; }

    double draw(Rng& rng) const {
        const double target = rng.uniform() * total_;
        // first segment whose cumulative mass exceeds the target
        int lo = 0, hi = n_ - 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            if (cdf_[mid] <= target)
                lo = mid;
            else
                hi = mid;
        }
        const double t = target - cdf_[lo]; // mass inside segment [lo, lo+1]
        const double w0 = w_[lo], w1 = w_[lo + 1];
        const double dw = w1 - w0;
        double xi;
        if (std::abs(dw) < 1e-14 * (std::abs(w0) + std::abs(w1) + 1e-300)) {
            xi = w0 > 0 ? t / (dx_ * w0) : 0.5;
        } else {
            // solve dx (w0 xi + dw xi^2 / 2) = t on [0, 1]
            const double disc = w0 * w0 + 2.0 * dw * t / dx_;
            xi = (std::sqrt(std::max(disc, 0.0)) - w0) / dw;
        }
        xi = std::min(1.0, std::max(0.0, xi));
        return x_min_ + (lo + xi) * dx_;
    }

  private:
    const double* w_;
    int n_;
    double x_min_, dx_;
    std::vector<double> cdf_;
    double total_ = 0.0;
};

void require_unit_norm(double norm, const char* who) {
    if (std::abs(norm - 1.0) > 1e-6)
        throw NotNormalized(std::string(who) + ": state norm is " + std::to_string(norm));
}

} // namespace

std::vector<double> sample_positions_1d(const WaveField1D& psi, int m, uint64_t seed) {
    if (m < 1) throw Error("sample_positions_1d: m must be >= 1");
    require_unit_norm(psi.norm(), "sample_positions_1d");

    std::vector<double> dens(psi.grid.n);
    for (int i = 0; i < psi.grid.n; ++i) dens[i] = std::norm(psi.amp[i]);
    TrapezoidSampler sampler(dens.data(), psi.grid.n, psi.grid.x_min, psi.grid.dx());

    Rng rng(seed);
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = sampler.draw(rng);
    return out;
}

std::vector<Sample2D> sample_positions_2d(const WaveField2D& psi, int m, uint64_t seed) {
    if (m < 1) throw Error("sample_positions_2d: m must be >= 1");
    require_unit_norm(psi.norm(), "sample_positions_2d");

    const int n1 = psi.grid_x1.n, n2 = psi.grid_x2.n;
    const double dx2 = psi.grid_x2.dx();

    // marginal density in x1 (trapezoid over x2)
    std::vector<double> marg(n1);
    for (int i = 0; i < n1; ++i) {
        const cplx* row = psi.amp.data() + static_cast<size_t>(i) * n2;
        double s = 0.5 * (std::norm(row[0]) + std::norm(row[n2 - 1]));
        for (int j = 1; j + 1 < n2; ++j) s += std::norm(row[j]);
        marg[i] = s * dx2;
    }
    TrapezoidSampler marg_sampler(marg.data(), n1, psi.grid_x1.x_min, psi.grid_x1.dx());

    Rng rng(seed);
    std::vector<Sample2D> out(m);
    std::vector<double> cond(n2);
    for (int s = 0; s < m; ++s) {
        const double x1 = marg_sampler.draw(rng);
        // conditional row, linearly interpolated between the two bracketing rows
        double u = (x1 - psi.grid_x1.x_min) / psi.grid_x1.dx();
        int i0 = std::min(n1 - 2, std::max(0, static_cast<int>(u)));
        double frac = std::min(1.0, std::max(0.0, u - i0));
        const cplx* r0 = psi.amp.data() + static_cast<size_t>(i0) * n2;
        const cplx* r1 = psi.amp.data() + static_cast<size_t>(i0 + 1) * n2;
        for (int j = 0; j < n2; ++j)
            cond[j] = (1.0 - frac) * std::norm(r0[j]) + frac * std::norm(r1[j]);
        TrapezoidSampler cond_sampler(cond.data(), n2, psi.grid_x2.x_min, dx2);
        out[s] = {x1, cond_sampler.draw(rng)};
    }
    return out;
}

std::vector<std::vector<double>> sample_symmetrized_metropolis(
    const std::vector<GaussianPacketSpec>& packets, Species species, int m,
    uint64_t seed, int burn_in) {
    const int n = static_cast<int>(packets.size());
    if (n < 1) throw Error("sample_symmetrized_metropolis: no packets");
    if (m < 1) throw Error("sample_symmetrized_metropolis: m must be >= 1");

    auto density = [&](const std::vector<double>& x) {
        return std::norm(symmetrized_value(packets, species, x));
    };

    Rng master(seed);
    std::vector<std::vector<double>> out(m);
    for (int w = 0; w < m; ++w) {
        Rng rng = master.fork(static_cast<uint64_t>(w));
        std::vector<double> x(n), prop(n);
        // start near the packet centers, jittered; retry until off any node
        double p_cur = 0.0;
        do {
            for (int j = 0; j < n; ++j)
                x[j] = packets[j].x0 + 0.5 * packets[j].sigma_x * rng.normal();
            p_cur = density(x);
        } while (p_cur <= 0.0);

        for (int it = 0; it < burn_in; ++it) {
            for (int j = 0; j < n; ++j)
                prop[j] = x[j] + 0.5 * packets[j].sigma_x * rng.normal();
            const double p_new = density(prop);
            if (p_new > 0.0 && rng.uniform() * p_cur < p_new) {
                x = prop;
                p_cur = p_new;
            }
        }
        out[w] = x;
    }
    return out;
}

} // namespace bohmex
