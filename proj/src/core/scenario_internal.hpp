#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/experiments.hpp"
#include "core/scenario.hpp"

namespace bohmex {

struct ScenarioIO {
    Config cfg;
    std::string name;
    std::string out_dir;
    uint64_t seed = 0;
    bool validate_only = false;
    std::vector<std::string> notes;

    // reject unknown keys and (when running) write the manifest of the fully
    // resolved configuration; call once all parameters have been read
    void commit();
    std::string path(const std::string& file) const { return out_dir + "/" + file; }
    void note(const std::string& s) { notes.push_back(s); }
};

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv);

// shared parameter readers
Grid1D read_grid(Config& cfg, const std::string& section, double lo, double hi,
                 long n_default);
PropagatorConfig read_prop(Config& cfg, const std::string& section, double dt_default);
GaussianPacketSpec read_packet(Config& cfg, const std::string& section, double x0,
                               double e0, int dir, double sigma, const UnitSystem& u);

// per-scenario entry points (0 success, 2 gate failure)
int scenario_fig1(ScenarioIO& io);
int scenario_fig3(ScenarioIO& io);
int scenario_fig6(ScenarioIO& io);
int scenario_fig7(ScenarioIO& io);
int scenario_fig11_12(ScenarioIO& io);
int scenario_fig13_14(ScenarioIO& io);
int scenario_appendixB(ScenarioIO& io);
int scenario_property_suite(ScenarioIO& io);
int scenario_transport_iv(ScenarioIO& io);
int scenario_transport_noise(ScenarioIO& io);

} // namespace bohmex
