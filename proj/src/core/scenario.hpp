#pragma once

#include <string>
#include <vector>

namespace bohmex {

// Scenario front end used by the C API and the CLI.
//   run: 0 success, 1 error, 2 validation-gate failure
//   validate: parses and sanity-checks without running; throws ConfigError
const std::vector<std::string>& scenario_names();
int run_scenario_file(const std::string& config_path,
                      const std::string& output_root_override = "");
std::string validate_scenario_file(const std::string& config_path);

} // namespace bohmex
