#include "core/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>

#include "core/errors.hpp"
#include "core/scenario_internal.hpp"

namespace bohmex {

namespace {

using ScenarioFn = std::function<int(ScenarioIO&)>;

const std::map<std::string, ScenarioFn>& scenario_table() {
    static const std::map<std::string, ScenarioFn> table = {
        {"fig1_kinetic_vs_d", scenario_fig1},
        {"fig3_free_distinguishable", scenario_fig3},
        {"fig6_fermion_boson_trajectories", scenario_fig6},
        {"fig7_energies", scenario_fig7},
        {"fig11_12_harmonic_no_exchange", scenario_fig11_12},
        {"fig13_14_harmonic_exchange", scenario_fig13_14},
        {"transport_iv", scenario_transport_iv},
        {"transport_noise", scenario_transport_noise},
        {"appendixB_spin_check", scenario_appendixB},
        {"property_suite", scenario_property_suite},
    };
    return table;
}

ScenarioIO make_io(const std::string& config_path, const std::string& root_override,
                   bool validate_only) {
    ScenarioIO io;
    io.cfg = Config::parse_file(config_path);
    io.validate_only = validate_only;
    io.name = io.cfg.require_string("scenario.name");
    if (!scenario_table().count(io.name))
        throw ConfigError("unknown scenario '" + io.name + "'");
    io.seed = static_cast<uint64_t>(io.cfg.get_long("scenario.seed", 12345));
    std::string dir = io.cfg.get_string("scenario.output_dir", "out/" + io.name);

    std::string root = root_override;
    if (root.empty()) {
        if (const char* env = std::getenv("BOHMEX_OUTPUT_ROOT")) root = env;
    }
    if (!root.empty() && !dir.empty() && dir.front() != '/')
        dir = root + "/" + dir;
    io.out_dir = dir;
    return io;
}

} // namespace

void ScenarioIO::commit() {
    cfg.reject_unknown();
    if (validate_only) return;
    std::filesystem::create_directories(out_dir);
    std::FILE* fp = std::fopen(path("manifest.txt").c_str(), "wb");
    if (!fp) throw Error("cannot write manifest in " + out_dir);
    std::fprintf(fp, "# resolved configuration (defaults filled in)\n");
    for (const auto& [k, v] : cfg.resolved()) std::fprintf(fp, "%s = %s\n", k.c_str(),
                                                           v.c_str());
    std::fclose(fp);
}

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error("cannot write summary " + path);
    for (const auto& [k, v] : kv) std::fprintf(fp, "%s = %s\n", k.c_str(), v.c_str());
    std::fclose(fp);
}

Grid1D read_grid(Config& cfg, const std::string& section, double lo, double hi,
                 long n_default) {
    const double x_min = cfg.get_double(section + ".x_min", lo);
    const double x_max = cfg.get_double(section + ".x_max", hi);
    const long n = cfg.get_long(section + ".points", n_default);
    return Grid1D(x_min, x_max, static_cast<int>(n));
}

PropagatorConfig read_prop(Config& cfg, const std::string& section, double dt_default) {
    PropagatorConfig p;
    p.dt = cfg.get_double(section + ".dt", dt_default);
    const std::string kin = cfg.get_string(section + ".kinetic", "compact4");
    if (kin == "compact4")
        p.kinetic = PropagatorConfig::Kinetic::Compact4;
    else if (kin == "fd3")
        p.kinetic = PropagatorConfig::Kinetic::Fd3;
    else
        throw ConfigError("unknown kinetic scheme '" + kin + "'");
    return p;
}

GaussianPacketSpec read_packet(Config& cfg, const std::string& section, double x0,
                               double e0, int dir, double sigma, const UnitSystem& u) {
    const double px = cfg.get_double(section + ".x0", x0);
    const double pe = cfg.get_double(section + ".e0", e0);
    const long pd = cfg.get_long(section + ".direction", dir);
    const double ps = cfg.get_double(section + ".sigma", sigma);
    return GaussianPacketSpec::from_energy(px, pe, static_cast<int>(pd), ps, u);
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, fn] : scenario_table()) v.push_back(k);
        return v;
    }();
    return names;
}

int run_scenario_file(const std::string& config_path,
                      const std::string& output_root_override) {
    ScenarioIO io = make_io(config_path, output_root_override, false);
    return scenario_table().at(io.name)(io);
}

std::string validate_scenario_file(const std::string& config_path) {
    ScenarioIO io = make_io(config_path, "", true);
    scenario_table().at(io.name)(io);
    std::string report = "OK: scenario '" + io.name + "' configuration is valid\n";
    for (const auto& n : io.notes) report += "warning: " + n + "\n";
    return report;
}

} // namespace bohmex
