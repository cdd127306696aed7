// Command-line front end. Everything goes through the public C API so this
// binary doubles as a smoke test of the shared library surface.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "bohmex/bohmex.h"

int main(int argc, char** argv) {
    CLI::App app{"bohmex - many-particle Bohmian trajectories with exchange"};
    app.set_version_flag("--version", bx_version());
    app.require_subcommand(1);

    std::string config_path;
    std::string output_root;

    auto* run = app.add_subcommand("run", "run a scenario configuration");
    run->add_option("config", config_path, "configuration file")->required();
    run->add_option("--output-root", output_root,
                    "prefix for relative output directories");

    auto* validate =
        app.add_subcommand("validate", "check a configuration without running");
    validate->add_option("config", config_path, "configuration file")->required();

    auto* list = app.add_subcommand("list-scenarios", "print the scenario names");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (int i = 0; i < bx_scenario_count(); ++i)
            std::printf("%s\n", bx_scenario_name(i));
        return 0;
    }

    bx_engine* engine = bx_engine_create();
    if (!engine) {
        std::fprintf(stderr, "error: cannot create engine\n");
        return 1;
    }
    int rc = 0;
    if (run->parsed()) {
        if (!output_root.empty()) bx_engine_set_output_root(engine, output_root.c_str());
        const bx_status st = bx_engine_run(engine, config_path.c_str());
        if (st == BX_OK) {
            std::printf("ok\n");
            rc = 0;
        } else if (st == BX_GATE_FAILED) {
            std::fprintf(stderr, "gate failed: %s\n", bx_engine_last_message(engine));
            rc = 2;
        } else {
            std::fprintf(stderr, "error: %s\n", bx_engine_last_message(engine));
            rc = 1;
        }
    } else if (validate->parsed()) {
        const bx_status st = bx_engine_validate(engine, config_path.c_str());
        std::printf("%s", bx_engine_last_message(engine));
        if (st != BX_OK) {
            std::fprintf(stderr, "invalid: %s\n", bx_engine_last_message(engine));
            rc = 1;
        }
    }
    bx_engine_destroy(engine);
    return rc;
}
