#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include "collab/errors.hpp"

namespace collab {

// Shortest round-trip decimal form via to_chars: locale-free, deterministic,
// and exactly re-parseable. All numeric CSV output goes through these.
inline std::string format_double(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("double formatting failed");
    return std::string(buf, ptr);
}

inline std::string format_int(std::int64_t value) {
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("integer formatting failed");
    return std::string(buf, ptr);
}

inline std::string format_uint(std::uint64_t value) {
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("integer formatting failed");
    return std::string(buf, ptr);
}

// Minimal quoting: only fields containing a comma, quote, or newline are
// quoted (doubling embedded quotes).
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace collab
