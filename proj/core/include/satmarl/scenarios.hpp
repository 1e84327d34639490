#pragma once

// Built-in scenario catalog covering the experiment grid: single-satellite
// default/limited/randomized runs and the four-satellite cluster and
// walker-delta variants.

#include <string>
#include <vector>

#include "satmarl/config.hpp"

namespace satmarl {

std::vector<std::string> scenario_names();
bool is_scenario(const std::string& name);
ExperimentConfig make_scenario(const std::string& name);  // throws ConfigError

// One human-readable line per scenario (name plus the key limits).
std::string scenario_summary(const std::string& name);

}  // namespace satmarl
