#pragma once

#include "core/transport.hpp"

namespace bohmex {

// Autocorrelation of current fluctuations over the post-transient record:
// R(k dt) = < dI(t) dI(t + k dt) >, unbiased time-average estimator.
struct Autocorrelation {
    double bin_width = 0.0;   // fs
    std::vector<double> r;    // lag 0 .. max_lag
    double mean_current = 0.0;
    long n_samples = 0;
};
Autocorrelation autocorrelation(const CurrentRecord& rec, double max_lag_fs,
                                double transient_trim_fs);

// Bartlett-windowed transform of R; one-sided PSD so that a Poisson train
// lands on the Schottky value 2 e <I>.
struct NoiseSpectrum {
    std::vector<double> freq_thz;
    std::vector<double> psd;      // e^2/fs per unit (1/fs) frequency
    double s_zero = 0.0;          // mean of the lowest three nonzero-f bins
    double fano = 0.0;
    bool fano_defined = false;
    double mean_current = 0.0;
    double delta_f_thz = 0.0;     // 1 / record length
    double nyquist_thz = 0.0;     // 1 / (2 bin width)
};
NoiseSpectrum power_spectrum(const Autocorrelation& ac);

} // namespace bohmex
