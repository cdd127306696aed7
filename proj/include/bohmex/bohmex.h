#ifndef BOHMEX_H
#define BOHMEX_H

/* C interface to the bohmex simulation core.
 *
 * All entry points are exported from the shared library with C linkage so
 * the engine can be driven from C, scripting FFIs, or the bundled CLI.
 * Errors are reported as status codes; the human-readable message for the
 * last failing call on an engine is kept on the engine handle.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bx_engine bx_engine; /* opaque */

typedef enum bx_status {
    BX_OK = 0,
    BX_ERROR = 1,            /* configuration or runtime error */
    BX_GATE_FAILED = 2,      /* scenario ran but its built-in gate failed */
    BX_BAD_ARGUMENT = 3
} bx_status;

/* library version string, static storage */
const char* bx_version(void);

/* engine lifecycle */
bx_engine* bx_engine_create(void);
void bx_engine_destroy(bx_engine* engine);

/* optional: redirect relative scenario output directories under this root
 * (equivalent to the BOHMEX_OUTPUT_ROOT environment variable, which it
 * overrides); returns BX_BAD_ARGUMENT on null engine */
bx_status bx_engine_set_output_root(bx_engine* engine, const char* path);

/* run a scenario configuration file; BX_OK, BX_GATE_FAILED or BX_ERROR */
bx_status bx_engine_run(bx_engine* engine, const char* config_path);

/* parse + sanity-check a configuration without running it; the report
 * (including warnings) is retrievable via bx_engine_last_message */
bx_status bx_engine_validate(bx_engine* engine, const char* config_path);

/* message from the last run/validate on this engine ("" if none);
 * valid until the next call on the same engine */
const char* bx_engine_last_message(const bx_engine* engine);

/* scenario catalogue */
int bx_scenario_count(void);
const char* bx_scenario_name(int index); /* NULL when out of range */

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BOHMEX_H */
