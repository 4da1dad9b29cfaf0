#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "collab/synthgen.hpp"

namespace collab {

// Flat key=value config dialect: '[section]' headers, one 'key = value' per
// line, '#' comments. Sections repeat (each [shock] opens a new one); keys
// within one section do not.
struct IniSection {
    std::string name;
    int line = 0;
    std::map<std::string, std::string> entries;
};

std::vector<IniSection> parse_ini(const std::string& text);

// Scenario file -> validated ScenarioConfig. Unknown sections or keys are
// ConfigErrors (misspellings must not silently change a scenario).
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig parse_scenario_file(const std::string& path);

}  // namespace collab
