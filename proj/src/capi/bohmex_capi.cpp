#include "bohmex/bohmex.h"

#include <exception>
#include <string>

#include "core/scenario.hpp"

struct bx_engine {
    std::string output_root;
    std::string message;
};

extern "C" {

const char* bx_version(void) { return "bohmex 1.0.0"; }

bx_engine* bx_engine_create(void) { return new (std::nothrow) bx_engine(); }

void bx_engine_destroy(bx_engine* engine) { delete engine; }

bx_status bx_engine_set_output_root(bx_engine* engine, const char* path) {
    if (!engine) return BX_BAD_ARGUMENT;
    engine->output_root = path ? path : "";
    return BX_OK;
}

bx_status bx_engine_run(bx_engine* engine, const char* config_path) {
    if (!engine || !config_path) return BX_BAD_ARGUMENT;
    engine->message.clear();
    try {
        const int rc = bohmex::run_scenario_file(config_path, engine->output_root);
        if (rc == 0) return BX_OK;
        if (rc == 2) {
            engine->message = "scenario gate failed";
            return BX_GATE_FAILED;
        }
        engine->message = "scenario returned error";
        return BX_ERROR;
    } catch (const std::exception& e) {
        engine->message = e.what();
        return BX_ERROR;
    } catch (...) {
        engine->message = "unknown error";
        return BX_ERROR;
    }
}

bx_status bx_engine_validate(bx_engine* engine, const char* config_path) {
    if (!engine || !config_path) return BX_BAD_ARGUMENT;
    engine->message.clear();
    try {
        engine->message = bohmex::validate_scenario_file(config_path);
        return BX_OK;
    } catch (const std::exception& e) {
        engine->message = e.what();
        return BX_ERROR;
    } catch (...) {
        engine->message = "unknown error";
        return BX_ERROR;
    }
}

const char* bx_engine_last_message(const bx_engine* engine) {
    return engine ? engine->message.c_str() : "";
}

int bx_scenario_count(void) {
    return static_cast<int>(bohmex::scenario_names().size());
}

const char* bx_scenario_name(int index) {
    const auto& names = bohmex::scenario_names();
    if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
    return names[static_cast<size_t>(index)].c_str();
}

} // extern "C"
