#include "core/packet.hpp"

#include <cmath>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace bohmex {

double UnitSystem::wavevector(double e) const {
    if (e < 0) throw Error("wavevector: negative energy");
    return std::sqrt(2.0 * e / hbar2_over_m());
}

GaussianPacketSpec GaussianPacketSpec::from_wavevector(double x0, double k0,
                                                       double sigma_x,
                                                       const UnitSystem& u) {
    GaussianPacketSpec s;
    s.x0 = x0;
    s.k0 = k0;
    s.sigma_x = sigma_x;
    s.e0 = u.kinetic(k0);
    s.validate(u);
    return s;
}

GaussianPacketSpec GaussianPacketSpec::from_energy(double x0, double e0, int direction,
                                                   double sigma_x, const UnitSystem& u) {
    GaussianPacketSpec s;
    s.x0 = x0;
    s.k0 = (direction < 0 ? -1.0 : 1.0) * u.wavevector(e0);
    s.sigma_x = sigma_x;
    s.e0 = e0;
    s.validate(u);
    return s;
}

cplx GaussianPacketSpec::eval(double x) const {
    const double a = std::pow(constants::pi * sigma_x * sigma_x, -0.25);
    const double d = x - x0;
    const double mod = a * std::exp(-d * d / (2.0 * sigma_x * sigma_x));
    return cplx(mod * std::cos(k0 * x), mod * std::sin(k0 * x));
}

void GaussianPacketSpec::validate(const UnitSystem& u) const {
    if (sigma_x <= 0) throw Error("GaussianPacketSpec: sigma_x must be positive");
    const double e_from_k = u.kinetic(k0);
    const double scale = std::max(std::abs(e0), std::abs(e_from_k));
    if (scale > 0 && std::abs(e0 - e_from_k) > 1e-12 * scale)
        throw Error("GaussianPacketSpec: e0 inconsistent with k0");
}

WaveField1D build_packet(const GaussianPacketSpec& spec, const Grid1D& grid) {
    const double span_lo = spec.x0 - grid.x_min;
    const double span_hi = grid.x_max - spec.x0;
    if (span_lo < 6.0 * spec.sigma_x || span_hi < 6.0 * spec.sigma_x)
        throw GridTooNarrow("packet at x0=" + std::to_string(spec.x0) +
                            " needs 6 sigma = " + std::to_string(6.0 * spec.sigma_x) +
                            " nm of clearance on both sides");

    WaveField1D f(grid);
    for (int i = 0; i < grid.n; ++i) f.amp[i] = spec.eval(grid.x(i));
    f.time = 0.0;
    return f;
}

} // namespace bohmex
