#include "collab/config.hpp"

#include <charconv>
#include <cmath>

#include "collab/errors.hpp"
#include "collab/io.hpp"

namespace collab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::int64_t to_int(const std::string& section, const std::string& key, const std::string& text) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + text +
                          "'");
    }
    return value;
}

std::uint64_t to_uint(const std::string& section, const std::string& key,
                      const std::string& text) {
    const std::int64_t value = to_int(section, key, text);
    if (value < 0) throw ConfigError("[" + section + "] " + key + ": must be >= 0");
    return static_cast<std::uint64_t>(value);
}

double to_double(const std::string& section, const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("[" + section + "] " + key + ": expected a number, got '" + text + "'");
    }
    return value;
}

// "2:0.5,3:0.3,5:0.2" -> {(2, 0.5), (3, 0.3), (5, 0.2)}
std::vector<std::pair<std::uint32_t, double>> parse_size_table(const std::string& section,
                                                               const std::string& text) {
    std::vector<std::pair<std::uint32_t, double>> table;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find(',', begin);
        if (end == std::string::npos) end = text.size();
        const std::string item = trim(text.substr(begin, end - begin));
        begin = end + 1;
        if (item.empty()) continue;
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("[" + section + "] sizes: expected size:weight entries, got '" +
                              item + "'");
        }
        const std::int64_t size = to_int(section, "sizes", trim(item.substr(0, colon)));
        const double weight = to_double(section, "sizes", trim(item.substr(colon + 1)));
        if (size < 1 || size > 0xffffffffLL) {
            throw ConfigError("[" + section + "] sizes: team size out of range");
        }
        table.emplace_back(static_cast<std::uint32_t>(size), weight);
    }
    return table;
}

void reject_unknown(const IniSection& section, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : section.entries) {
        bool found = false;
        for (const char* k : known) {
            if (key == k) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw ConfigError("[" + section.name + "] unknown key '" + key + "'");
        }
    }
}

const std::string* get(const IniSection& section, const char* key) {
    const auto it = section.entries.find(key);
    return it == section.entries.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<IniSection> parse_ini(const std::string& text) {
    std::vector<IniSection> sections;
    std::size_t begin = 0;
    int line_no = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(begin, end - begin);
        begin = end + 1;
        ++line_no;
        if (begin > text.size() && line.empty()) break;

        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            IniSection section;
            section.name = trim(line.substr(1, line.size() - 2));
            section.line = line_no;
            if (section.name.empty()) {
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            }
            sections.push_back(std::move(section));
            continue;
        }
        if (sections.empty()) {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": key outside of any [section]");
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        auto& entries = sections.back().entries;
        if (entries.count(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                              "' in [" + sections.back().name + "]");
        }
        entries.emplace(key, value);
    }
    return sections;
}

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig config;
    bool saw_scenario = false;
    bool saw_growth = false;
    bool saw_team = false;
    bool saw_career = false;
    for (const auto& section : parse_ini(text)) {
        if (section.name == "scenario") {
            if (saw_scenario) throw ConfigError("duplicate [scenario] section");
            saw_scenario = true;
            reject_unknown(section, {"seed", "start_year", "end_year", "entrant_share",
                                     "entrant_share_decay", "participation_cap"});
            if (const auto* v = get(section, "seed")) config.seed = to_uint("scenario", "seed", *v);
            if (const auto* v = get(section, "start_year")) {
                config.start_year = static_cast<Year>(to_int("scenario", "start_year", *v));
            }
            if (const auto* v = get(section, "end_year")) {
                config.end_year = static_cast<Year>(to_int("scenario", "end_year", *v));
            }
            if (const auto* v = get(section, "entrant_share")) {
                config.entrant_share = to_double("scenario", "entrant_share", *v);
            }
            if (const auto* v = get(section, "entrant_share_decay")) {
                config.entrant_share_decay = to_double("scenario", "entrant_share_decay", *v);
            }
            if (const auto* v = get(section, "participation_cap")) {
                config.participation_cap =
                    static_cast<std::uint32_t>(to_uint("scenario", "participation_cap", *v));
            }
        } else if (section.name == "growth") {
            if (saw_growth) throw ConfigError("duplicate [growth] section");
            saw_growth = true;
            reject_unknown(section, {"alpha", "scale", "breakpoint", "alpha2"});
            if (const auto* v = get(section, "alpha")) {
                config.growth.alpha = to_double("growth", "alpha", *v);
            }
            if (const auto* v = get(section, "scale")) {
                config.growth.scale = to_double("growth", "scale", *v);
            }
            if (const auto* v = get(section, "breakpoint")) {
                config.growth.breakpoint = static_cast<Year>(to_int("growth", "breakpoint", *v));
            }
            if (const auto* v = get(section, "alpha2")) {
                config.growth.alpha2 = to_double("growth", "alpha2", *v);
            }
        } else if (section.name == "team_size") {
            if (saw_team) throw ConfigError("duplicate [team_size] section");
            saw_team = true;
            reject_unknown(section, {"kind", "size", "sizes", "gamma", "max_size"});
            if (const auto* v = get(section, "kind")) {
                if (*v == "fixed") {
                    config.team_size.kind = TeamSizeSpec::Kind::fixed;
                } else if (*v == "categorical") {
                    config.team_size.kind = TeamSizeSpec::Kind::categorical;
                } else if (*v == "partner_powerlaw") {
                    config.team_size.kind = TeamSizeSpec::Kind::partner_powerlaw;
                } else {
                    throw ConfigError("[team_size] kind: expected fixed, categorical, or "
                                      "partner_powerlaw, got '" +
                                      *v + "'");
                }
            }
            if (const auto* v = get(section, "size")) {
                const std::int64_t size = to_int("team_size", "size", *v);
                if (size < 1 || size > 0xffffffffLL) {
                    throw ConfigError("[team_size] size: out of range");
                }
                config.team_size.fixed_size = static_cast<std::uint32_t>(size);
            }
            if (const auto* v = get(section, "sizes")) {
                config.team_size.categories = parse_size_table("team_size", *v);
            }
            if (const auto* v = get(section, "gamma")) {
                config.team_size.gamma = to_double("team_size", "gamma", *v);
            }
            if (const auto* v = get(section, "max_size")) {
                const std::int64_t m = to_int("team_size", "max_size", *v);
                if (m < 2 || m > 0xffffffffLL) {
                    throw ConfigError("[team_size] max_size: out of range");
                }
                config.team_size.max_size = static_cast<std::uint32_t>(m);
            }
        } else if (section.name == "career") {
            if (saw_career) throw ConfigError("duplicate [career] section");
            saw_career = true;
            reject_unknown(section, {"weibull_k", "weibull_lambda"});
            if (const auto* v = get(section, "weibull_k")) {
                config.career.weibull_k = to_double("career", "weibull_k", *v);
            }
            if (const auto* v = get(section, "weibull_lambda")) {
                config.career.weibull_lambda = to_double("career", "weibull_lambda", *v);
            }
        } else if (section.name == "shock") {
            reject_unknown(section, {"name", "start", "end", "entry_multiplier", "size_multiplier",
                                     "recovery_ramp_years"});
            ShockSpec shock;
            if (const auto* v = get(section, "name")) shock.name = *v;
            if (const auto* v = get(section, "start")) {
                shock.start = static_cast<Year>(to_int("shock", "start", *v));
            }
            if (const auto* v = get(section, "end")) {
                shock.end = static_cast<Year>(to_int("shock", "end", *v));
            }
            if (const auto* v = get(section, "entry_multiplier")) {
                shock.entry_multiplier = to_double("shock", "entry_multiplier", *v);
            }
            if (const auto* v = get(section, "size_multiplier")) {
                shock.size_multiplier = to_double("shock", "size_multiplier", *v);
            }
            if (const auto* v = get(section, "recovery_ramp_years")) {
                shock.recovery_ramp_years =
                    static_cast<Year>(to_int("shock", "recovery_ramp_years", *v));
            }
            config.shocks.push_back(std::move(shock));
        } else {
            throw ConfigError("line " + std::to_string(section.line) + ": unknown section [" +
                              section.name + "]");
        }
    }
    validate_scenario(config);
    return config;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::string text;
    try {
        text = slurp_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    try {
        return parse_scenario(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace collab
