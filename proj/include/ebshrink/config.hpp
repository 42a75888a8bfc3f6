#pragma once

#include <filesystem>
#include <string>

#include "ebshrink/simlab.hpp"

namespace ebshrink {

// Scenario config files are flat `key = value` lines with `#` comments.
// Every applicable ScenarioConfig field must be present explicitly; unknown
// keys and fields inapplicable to the family are rejected.
ScenarioConfig parse_scenario_file(const std::filesystem::path& path);
ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin = "<config>");

std::string serialize_scenario(const ScenarioConfig& cfg);

}  // namespace ebshrink
