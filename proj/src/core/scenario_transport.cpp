#include <algorithm>
#include <sstream>
#include <cmath>
#include <cstdio>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/noise.hpp"
#include "core/parallel.hpp"
#include "core/scenario_internal.hpp"
#include "core/transport.hpp"

namespace bohmex {

namespace {

DeviceConfig read_device(Config& cfg) {
    DeviceConfig d;
    d.l_active = cfg.get_double("device.l_active", d.l_active);
    d.contact_extension = cfg.get_double("device.contact_extension", d.contact_extension);
    d.fermi_level = cfg.get_double("device.fermi_level", d.fermi_level);
    d.subband_offset = cfg.get_double("device.subband_offset", d.subband_offset);
    d.temperature = cfg.get_double("device.temperature", d.temperature);
    d.mass_eff_ratio = cfg.get_double("device.mass_eff_ratio", d.mass_eff_ratio);
    d.epsilon_r = cfg.get_double("device.epsilon_r", d.epsilon_r);
    d.injection_sigma = cfg.get_double("device.injection_sigma", d.injection_sigma);
    d.injection_offset = cfg.get_double("device.injection_offset", d.injection_offset);
    d.k_cells = static_cast<int>(cfg.get_long("device.k_cells", d.k_cells));
    d.population_cap =
        static_cast<int>(cfg.get_long("device.population_cap", d.population_cap));
    d.grid_points = static_cast<int>(cfg.get_long("device.grid_points", d.grid_points));
    d.dt = cfg.get_double("device.dt", d.dt);
    d.current_bin = cfg.get_double("device.current_bin", d.current_bin);
    d.exit_margin = cfg.get_double("device.exit_margin", d.exit_margin);
    d.cap_width = cfg.get_double("device.cap_width", d.cap_width);
    d.cap_strength = cfg.get_double("device.cap_strength", d.cap_strength);
    return d;
}

std::vector<InteractionMode> read_modes(Config& cfg) {
    const std::string s = cfg.get_string("transport.modes", "WI,CI,EI,CEI");
    std::vector<InteractionMode> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (item == "WI") out.push_back(InteractionMode::WI);
        else if (item == "CI") out.push_back(InteractionMode::CI);
        else if (item == "EI") out.push_back(InteractionMode::EI);
        else if (item == "CEI") out.push_back(InteractionMode::CEI);
        else throw ConfigError("unknown interaction mode '" + item + "'");
    }
    if (out.empty()) throw ConfigError("transport.modes is empty");
    return out;
}

std::string bias_tag(double bias) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0fmV", bias * 1e3);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void validate_device(ScenarioIO& io, const DeviceConfig& d) {
    d.validate();
    UnitSystem u;
    u.mass_eff_ratio = d.mass_eff_ratio;
    const auto cells = make_injection_cells(d, u, 0);
    const double k_max = cells.back().k_hi;
    const double phase = u.kinetic(k_max) * d.dt / u.hbar;
    if (phase > constants::pi / 4.0)
        io.note("device.dt advances the fastest injected packet by " +
                std::to_string(phase) + " rad per step (> pi/4)");
    const double v_fast = u.velocity(k_max);
    const double v_cap = d.grid().dx() / d.dt;
    if (v_fast > v_cap)
        io.note("velocity cap dx/dt = " + std::to_string(v_cap) +
                " nm/fs clips injected electrons up to " + std::to_string(v_fast) +
                " nm/fs; decrease dt or grid_points");
}

} // namespace

int scenario_transport_iv(ScenarioIO& io) {
    DeviceConfig dev = read_device(io.cfg);
    const auto biases = io.cfg.get_double_list("transport.bias_list", {0.0, 0.05, 0.1, 0.2});
    const auto modes = read_modes(io.cfg);
    const double t_total = io.cfg.get_double("transport.t_total", 20000.0);
    const int replicas = static_cast<int>(io.cfg.get_long("transport.replicas", 1));
    io.commit();
    validate_device(io, dev);
    if (io.validate_only) return 0;

    struct Cell {
        double bias;
        InteractionMode mode;
        // replica-aggregated
        double i_mean = 0.0, i_se = 0.0;
        double d_sd = 0.0, d_ds = 0.0, d_ss = 0.0, d_dd = 0.0;
        long injected = 0, entered = 0, unclosed = 0;
        double mean_inflight = 0.0, mean_fields = 0.0;
        int max_inflight = 0;
    };
    std::vector<Cell> cells;
    for (double b : biases)
        for (auto m : modes) cells.push_back({b, m});

    const long n_runs = static_cast<long>(cells.size()) * replicas;
    std::vector<TransportResult> results(n_runs);
    parallel_for(n_runs, [&](long r) {
        const long c = r / replicas;
        const long rep = r % replicas;
        DeviceConfig d = dev;
        d.bias = cells[c].bias;
        results[r] = run_transport(d, cells[c].mode, t_total,
                                   io.seed + 7919 * (r + 1));
        (void)rep;
    }, 1);

    CsvWriter csv(io.path("iv.csv"),
                  {"bias_v", "mode", "mean_current_e_fs", "se", "d_sd", "d_ds", "d_ss",
                   "d_dd", "injected", "entered_active", "mean_inflight", "mean_fields",
                   "max_inflight", "unclosed"});
    std::vector<std::pair<std::string, std::string>> summary;
    summary.emplace_back("t_total_fs", fmt(t_total));
    summary.emplace_back("replicas", fmt(replicas));

    for (size_t c = 0; c < cells.size(); ++c) {
        Cell& cell = cells[c];
        std::vector<FlightRecord> flights;
        double isum = 0.0, isum2 = 0.0;
        for (int rep = 0; rep < replicas; ++rep) {
            const TransportResult& tr = results[c * replicas + rep];
            isum += tr.mean_current;
            isum2 += tr.mean_current * tr.mean_current;
            flights.insert(flights.end(), tr.flights.begin(), tr.flights.end());
            cell.injected += tr.injected;
            cell.entered += tr.entered_active;
            cell.unclosed += tr.unclosed;
            cell.mean_inflight += tr.mean_inflight / replicas;
            cell.mean_fields += tr.mean_fields / replicas;
            cell.max_inflight = std::max(cell.max_inflight, tr.max_inflight);
        }
        cell.i_mean = isum / replicas;
        cell.i_se = replicas > 1
                        ? std::sqrt(std::max(0.0, isum2 / replicas - cell.i_mean * cell.i_mean) /
                                    (replicas - 1))
                        : 0.0;
        const DwellStatistics dw = dwell_statistics(flights);
        cell.d_sd = dw.d_sd;
        cell.d_ds = dw.d_ds;
        cell.d_ss = dw.d_ss;
        cell.d_dd = dw.d_dd;

        csv.row_labeled(fmt(cell.bias) + "," + mode_name(cell.mode),
                        {cell.i_mean, cell.i_se, cell.d_sd, cell.d_ds, cell.d_ss,
                         cell.d_dd, static_cast<double>(cell.injected),
                         static_cast<double>(cell.entered), cell.mean_inflight,
                         cell.mean_fields, static_cast<double>(cell.max_inflight),
                         static_cast<double>(cell.unclosed)});
        summary.emplace_back(std::string("i_") + mode_name(cell.mode) + "_" +
                                 bias_tag(cell.bias),
                             fmt(cell.i_mean));

        // current trace of the first replica, for plotting
        const TransportResult& tr0 = results[c * replicas];
        CsvWriter trace(io.path(std::string("current_") + mode_name(cell.mode) + "_" +
                                bias_tag(cell.bias) + ".csv"),
                        {"time_fs", "current_e_fs"});
        for (size_t b = 0; b < tr0.current.current.size(); ++b)
            trace.row({(b + 0.5) * tr0.current.bin_width, tr0.current.current[b]});
    }
    write_summary(io.path("summary.txt"), summary);
    return 0;
}

int scenario_transport_noise(ScenarioIO& io) {
    DeviceConfig dev = read_device(io.cfg);
    dev.bias = io.cfg.get_double("transport.bias", 0.05);
    const auto modes = read_modes(io.cfg);
    const double t_total = io.cfg.get_double("transport.t_total", 30000.0);
    const int replicas = static_cast<int>(io.cfg.get_long("transport.replicas", 2));
    const double max_lag = io.cfg.get_double("noise.max_lag", 1500.0);
    const double transient = io.cfg.get_double("noise.transient", 4000.0);
    io.commit();
    validate_device(io, dev);
    if (io.validate_only) return 0;
    if (t_total - transient < 10.0 * max_lag)
        throw ConfigError("transport.t_total too short for noise.max_lag");

    const long n_runs = static_cast<long>(modes.size()) * replicas;
    std::vector<TransportResult> results(n_runs);
    parallel_for(n_runs, [&](long r) {
        results[r] = run_transport(dev, modes[r / replicas], t_total,
                                   io.seed + 104729 * (r + 1));
    }, 1);

    std::vector<NoiseSpectrum> spectra(modes.size());
    std::vector<std::pair<std::string, std::string>> summary;
    summary.emplace_back("bias_v", fmt(dev.bias));
    for (size_t m = 0; m < modes.size(); ++m) {
        // replica-averaged autocorrelation, then one transform
        Autocorrelation avg;
        for (int rep = 0; rep < replicas; ++rep) {
            const auto ac =
                autocorrelation(results[m * replicas + rep].current, max_lag, transient);
            if (rep == 0) {
                avg = ac;
            } else {
                for (size_t k = 0; k < avg.r.size(); ++k) avg.r[k] += ac.r[k];
                avg.mean_current += ac.mean_current;
            }
        }
        for (auto& v : avg.r) v /= replicas;
        avg.mean_current /= replicas;
        spectra[m] = power_spectrum(avg);
        summary.emplace_back(std::string("i_") + mode_name(modes[m]),
                             fmt(spectra[m].mean_current));
        summary.emplace_back(std::string("s_zero_") + mode_name(modes[m]),
                             fmt(spectra[m].s_zero));
        summary.emplace_back(std::string("fano_") + mode_name(modes[m]),
                             spectra[m].fano_defined ? fmt(spectra[m].fano) : "undefined");

        // high-band peak metric: max over f >= 1 THz against the band median
        const auto& sp = spectra[m];
        std::vector<double> band;
        double peak = 0.0;
        for (size_t j = 0; j < sp.freq_thz.size(); ++j)
            if (sp.freq_thz[j] >= 1.0 && sp.freq_thz[j] <= 5.0) {
                band.push_back(sp.psd[j]);
                peak = std::max(peak, sp.psd[j]);
            }
        double med = 0.0;
        if (!band.empty()) {
            std::nth_element(band.begin(), band.begin() + band.size() / 2, band.end());
            med = band[band.size() / 2];
        }
        summary.emplace_back(std::string("peak_ratio_") + mode_name(modes[m]),
                             fmt(med > 0 ? peak / med : 0.0));
    }

    std::vector<std::string> header = {"f_thz"};
    for (auto m : modes) header.push_back(std::string("s_") + mode_name(m));
    CsvWriter csv(io.path("psd.csv"), header);
    const size_t nf = spectra[0].freq_thz.size();
    for (size_t j = 0; j < nf; ++j) {
        std::vector<double> row = {spectra[0].freq_thz[j]};
        for (size_t m = 0; m < modes.size(); ++m) row.push_back(spectra[m].psd[j]);
        csv.row(row);
    }
    write_summary(io.path("summary.txt"), summary);
    return 0;
}

} // namespace bohmex
