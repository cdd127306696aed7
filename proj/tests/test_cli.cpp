#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/scenario.hpp"

using namespace bohmex;
namespace fs = std::filesystem;

namespace {

std::string write_cfg(const std::string& name, const std::string& text) {
    const std::string path = "cli_test_" + name + ".cfg";
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("scenario catalogue is complete") {
    const auto& names = scenario_names();
    CHECK(names.size() == 10);
    for (const char* expected :
         {"fig1_kinetic_vs_d", "fig3_free_distinguishable",
          "fig6_fermion_boson_trajectories", "fig7_energies",
          "fig11_12_harmonic_no_exchange", "fig13_14_harmonic_exchange", "transport_iv",
          "transport_noise", "appendixB_spin_check", "property_suite"}) {
        bool found = false;
        for (const auto& n : names) found = found || n == expected;
        CAPTURE(expected);
        CHECK(found);
    }
}

TEST_CASE("validate: grid clearance, unknown keys, dt warning") {
    const auto ok = write_cfg("ok", "[scenario]\nname = fig3_free_distinguishable\n");
    CHECK(validate_scenario_file(ok).substr(0, 2) == "OK");

    const auto narrow = write_cfg(
        "narrow", "[scenario]\nname = fig3_free_distinguishable\n[grid]\nx_max = 100\n");
    CHECK_THROWS_AS(validate_scenario_file(narrow), GridTooNarrow);

    const auto unknown = write_cfg(
        "unknown", "[scenario]\nname = fig3_free_distinguishable\nbogus_key = 1\n");
    CHECK_THROWS_AS(validate_scenario_file(unknown), ConfigError);

    const auto coarse = write_cfg(
        "coarse", "[scenario]\nname = fig3_free_distinguishable\n[run]\ndt = 4.0\n");
    const std::string rep = validate_scenario_file(coarse);
    CHECK(rep.find("warning") != std::string::npos);

    const auto missing = write_cfg("missing", "[scenario]\nseed = 2\n");
    CHECK_THROWS_AS(validate_scenario_file(missing), ConfigError);
}

TEST_CASE("runs are reproducible byte for byte") {
    const std::string cfg_text =
        "[scenario]\n"
        "name = fig3_free_distinguishable\n"
        "seed = 31\n"
        "output_dir = cli_out/fig3a\n"
        "[grid]\n"
        "points = 1024\n"
        "[run]\n"
        "members = 120\n"
        "steps = 300\n"
        "record_stride = 50\n";
    const auto a = write_cfg("repa", cfg_text);
    REQUIRE(run_scenario_file(a) == 0);
    const std::string first = slurp("cli_out/fig3a/energies.csv");
    REQUIRE(!first.empty());
    fs::remove("cli_out/fig3a/energies.csv");
    REQUIRE(run_scenario_file(a) == 0);
    CHECK(slurp("cli_out/fig3a/energies.csv") == first);

    // manifest records the resolved configuration
    const std::string manifest = slurp("cli_out/fig3a/manifest.txt");
    CHECK(manifest.find("scenario.seed = 31") != std::string::npos);
    CHECK(manifest.find("run.members = 120") != std::string::npos);
    CHECK(manifest.find("grid.x_min = -400") != std::string::npos); // default echoed
}

TEST_CASE("transport_iv emits one row per bias and mode") {
    const auto cfg = write_cfg("iv",
                               "[scenario]\n"
                               "name = transport_iv\n"
                               "seed = 3\n"
                               "output_dir = cli_out/iv\n"
                               "[device]\n"
                               "grid_points = 512\n"
                               "population_cap = 80\n"
                               "[transport]\n"
                               "bias_list = 0.0, 0.1\n"
                               "modes = WI,CI\n"
                               "t_total = 1200\n");
    REQUIRE(run_scenario_file(cfg) == 0);
    std::ifstream in("cli_out/iv/iv.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line); // header
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    CHECK(fs::exists("cli_out/iv/current_WI_0mV.csv"));
    CHECK(fs::exists("cli_out/iv/current_CI_100mV.csv"));
    CHECK(fs::exists("cli_out/iv/summary.txt"));
}

TEST_CASE("property_suite scenario passes end to end") {
    const auto cfg = write_cfg("prop",
                               "[scenario]\n"
                               "name = property_suite\n"
                               "seed = 8\n"
                               "output_dir = cli_out/prop\n");
    CHECK(run_scenario_file(cfg) == 0);
    CHECK(fs::exists("cli_out/prop/report.txt"));
}

TEST_CASE("appendixB scenario reports the factorization quality") {
    const auto cfg = write_cfg("spin",
                               "[scenario]\n"
                               "name = appendixB_spin_check\n"
                               "seed = 12\n"
                               "output_dir = cli_out/spin\n"
                               "[scan]\n"
                               "points = 150\n");
    REQUIRE(run_scenario_file(cfg) == 0);
    const std::string summary = slurp("cli_out/spin/summary.txt");
    CHECK(summary.find("separated_max_rel_diff") != std::string::npos);
    // the separated configuration must factorize to better than 1e-3
    const auto pos = summary.find("separated_max_rel_diff = ");
    REQUIRE(pos != std::string::npos);
    const double v = std::stod(summary.substr(pos + 25));
    CHECK(v < 1e-3);
}

TEST_SUITE_END();
