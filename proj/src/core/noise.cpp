#include "core/noise.hpp"

#include <cmath>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace bohmex {

Autocorrelation autocorrelation(const CurrentRecord& rec, double max_lag_fs,
                                double transient_trim_fs) {
    const double dt = rec.bin_width;
    const long skip = static_cast<long>(std::ceil(transient_trim_fs / dt));
    const long n = static_cast<long>(rec.current.size()) - skip;
    const long lags = static_cast<long>(std::floor(max_lag_fs / dt));
    if (n < 10 * lags || n < 2 || lags < 1)
        throw RecordTooShort("autocorrelation needs a record of at least 10 max_lag (" +
                             std::to_string(n) + " usable bins)");

    const double* x = rec.current.data() + skip;
    double mean = 0.0;
    for (long i = 0; i < n; ++i) mean += x[i];
    mean /= n;

    Autocorrelation ac;
    ac.bin_width = dt;
    ac.mean_current = mean;
    ac.n_samples = n;
    ac.r.resize(lags + 1);
    for (long k = 0; k <= lags; ++k) {
        double s = 0.0;
        for (long i = 0; i + k < n; ++i) s += (x[i] - mean) * (x[i + k] - mean);
        ac.r[k] = s / (n - k);
    }
    return ac;
}

NoiseSpectrum power_spectrum(const Autocorrelation& ac) {
    const double dt = ac.bin_width;
    const long lags = static_cast<long>(ac.r.size()) - 1;
    const double t_record = ac.n_samples * dt;

    NoiseSpectrum sp;
    sp.mean_current = ac.mean_current;
    sp.delta_f_thz = 1e3 / t_record;       // THz; 1 THz = 1e-3 fs^-1
    sp.nyquist_thz = 1e3 / (2.0 * dt);

    const double df = 1.0 / t_record;      // fs^-1
    const double f_ny = 1.0 / (2.0 * dt);
    const long n_f = static_cast<long>(std::floor(f_ny / df)) + 1;
    sp.freq_thz.resize(n_f);
    sp.psd.resize(n_f);
    for (long j = 0; j < n_f; ++j) {
        const double f = j * df;
        // one-sided: S(f) = 2 dt [R0 + 2 sum_k w_k R_k cos(2 pi f k dt)]
        double s = ac.r[0];
        for (long k = 1; k <= lags; ++k) {
            const double w = 1.0 - static_cast<double>(k) / (lags + 1); // Bartlett
            s += 2.0 * w * ac.r[k] * std::cos(2.0 * constants::pi * f * k * dt);
        }
        sp.freq_thz[j] = f * 1e3;
        sp.psd[j] = 2.0 * dt * s;
    }

    double s0 = 0.0;
    const int navg = std::min<long>(3, n_f - 1);
    for (int j = 1; j <= navg; ++j) s0 += sp.psd[j];
    sp.s_zero = navg > 0 ? s0 / navg : sp.psd[0];

    const double se_mean = std::sqrt(std::max(ac.r[0], 0.0) / ac.n_samples);
    if (std::abs(ac.mean_current) > 3.0 * se_mean && ac.mean_current != 0.0) {
        sp.fano = sp.s_zero / (2.0 * std::abs(ac.mean_current));
        sp.fano_defined = true;
    } else {
        sp.fano = std::nan("");
        sp.fano_defined = false;
    }
    return sp;
}

} // namespace bohmex
