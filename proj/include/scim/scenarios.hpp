#pragma once

#include <string>
#include <vector>

#include "scim/config.hpp"

namespace scim {

/// Names of the built-in experiments, e.g. "1p1w-exp1" ... "2p2w-exp3".
const std::vector<std::string>& builtin_scenario_names();

bool is_builtin_scenario(const std::string& name);

/// Throws ConfigError for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);

/// Built-in name or path to a JSON scenario file.
ScenarioConfig load_scenario(const std::string& name_or_path);

/// Splits "1p1w-exp2" into {"1P1W", "Exp2"}; other names map to {name, ""}.
std::pair<std::string, std::string> scenario_labels(const std::string& name);

}  // namespace scim
