#pragma once

#include <memory>
#include <vector>

#include "core/conditional.hpp"
#include "core/rng.hpp"

namespace bohmex {

// 1D two-terminal channel: active region [0, l_active], flat contacts on
// both sides, packets injected deep inside the contacts and removed once
// they are well past the far injection point.
struct DeviceConfig {
    double l_active = 30.0;           // nm
    double contact_extension = 280.0; // grid reach beyond each active border, nm
    double fermi_level = 0.15;        // eV above the contact band bottom
    double subband_offset = 0.13;     // eV, first lateral subband
    double temperature = 300.0;       // K
    double mass_eff_ratio = 0.067;
    double bias = 0.0;                // V, linear drop over the active region
    double epsilon_r = 12.9;
    double injection_sigma = 25.0;    // nm
    double injection_offset = 100.0;  // nm from the active border
    int k_cells = 32;
    int population_cap = 32;
    int grid_points = 1024;
    double dt = 0.5;                  // fs
    double current_bin = 1.0;         // fs
    double exit_margin = 100.0;       // removal planes this far beyond injection
    double cap_width = 60.0;          // nm, absorbing layer
    double cap_strength = 0.3;        // eV

    double source_x0() const { return -injection_offset; }
    double drain_x0() const { return l_active + injection_offset; }
    double exit_plane_source() const { return source_x0() - exit_margin; }
    double exit_plane_drain() const { return drain_x0() + exit_margin; }
    Grid1D grid() const {
        return Grid1D(-contact_extension, l_active + contact_extension, grid_points);
    }
    void validate() const;
};

enum class InteractionMode { WI, CI, EI, CEI };
inline bool mode_has_coulomb(InteractionMode m) {
    return m == InteractionMode::CI || m == InteractionMode::CEI;
}
inline bool mode_has_exchange(InteractionMode m) {
    return m == InteractionMode::EI || m == InteractionMode::CEI;
}
const char* mode_name(InteractionMode m);

// one phase-space injection cell of a contact (Delta k wide); attempts fire
// at multiples of t0 and succeed with the Fermi-Dirac occupation
struct InjectionCell {
    int contact = 0; // 0 source, 1 drain
    double k_lo = 0.0, k_hi = 0.0;
    double k_center = 0.0;
    double t0 = 0.0;        // fs, minimum temporal separation
    double occupation = 0.0;
    long next_attempt = 1;  // attempts at next_attempt * t0
};

std::vector<InjectionCell> make_injection_cells(const DeviceConfig& cfg,
                                                const UnitSystem& units, int contact);

struct InjectionEvent {
    double time = 0.0;
    int contact = 0;
    int spin = 0; // 0 up, 1 down
    GaussianPacketSpec packet;
    double start_position = 0.0;
};

// all accepted injections of one cell inside [t_begin, t_end); advances the
// cell's attempt clock. Spin alternates per contact through spin_counter.
std::vector<InjectionEvent> injection_attempts(InjectionCell& cell, double t_begin,
                                               double t_end, const DeviceConfig& cfg,
                                               const UnitSystem& units, Rng& rng,
                                               long& spin_counter);

struct FlightRecord {
    long id = -1;
    double t_in = 0.0;
    double t_out = 0.0;
    int entry = 0; // 0 source, 1 drain
    int exit = 0;
    int spin = 0;
    double dwell = 0.0; // time accumulated inside the active region, fs
};

struct CurrentRecord {
    double bin_width = 1.0; // fs
    std::vector<double> current; // e/fs
    long net_crossings = 0;
    double mean(double t_from = 0.0) const;
};

struct DwellStatistics {
    double d_sd = 0.0, d_ds = 0.0, d_ss = 0.0, d_dd = 0.0; // normalized
    double total = 0.0;                                    // fs
    bool empty = false;
};
DwellStatistics dwell_statistics(const std::vector<FlightRecord>& records);

struct TransportResult {
    CurrentRecord current;
    std::vector<FlightRecord> flights;
    long injected = 0;
    long removed = 0;
    long entered_active = 0;
    long unclosed = 0;
    int max_inflight = 0;
    double mean_inflight = 0.0;
    double mean_fields = 0.0;
    double mean_current = 0.0; // over the post-transient window
    double transient = 0.0;    // fs trimmed for mean_current
};

TransportResult run_transport(const DeviceConfig& cfg, InteractionMode mode,
                              double t_total, uint64_t seed);

} // namespace bohmex
