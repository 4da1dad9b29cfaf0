#include "collab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "collab/errors.hpp"

namespace collab {

namespace {

constexpr std::size_t kMaxErrorSamples = 8;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, begin);
        if (pos == std::string::npos) {
            out.push_back(line.substr(begin));
            return out;
        }
        out.push_back(line.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

bool parse_int(const std::string& text, std::int64_t& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_num(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

EventFormat infer_format(const std::string& path, std::istream& in) {
    if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0) {
        return EventFormat::jsonl;
    }
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
        return EventFormat::csv;
    }
    const int c = in.peek();
    return c == '{' ? EventFormat::jsonl : EventFormat::csv;
}

void record_error(ParseStats& stats, std::uint64_t line_no, const std::string& reason) {
    ++stats.records_malformed;
    if (stats.error_samples.size() < kMaxErrorSamples) {
        stats.error_samples.push_back("line " + std::to_string(line_no) + ": " + reason);
    }
}

void json_escape_into(std::string& out, const std::string& s) {
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    constexpr char hex[] = "0123456789abcdef";
                    out += "\\u00";
                    out += hex[(c >> 4) & 0xf];
                    out += hex[c & 0xf];
                } else {
                    out += c;
                }
        }
    }
}

}  // namespace

ContributorId IdDictionary::intern(const std::string& key) {
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    if (keys_.size() > 0x7fffffffu) throw IngestError("contributor id space exhausted");
    const auto id = static_cast<ContributorId>(keys_.size());
    index_.emplace(key, id);
    keys_.push_back(key);
    return id;
}

ParseStats parse_events(const std::string& path, IdDictionary& dict,
                        const std::function<void(ProjectEvent&&)>& sink,
                        const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open events file: " + path);
    EventFormat format = options.format;
    if (format == EventFormat::infer) format = infer_format(path, in);

    ParseStats stats;
    std::string line;
    std::uint64_t line_no = 0;
    bool saw_header = false;

    const auto finish_event = [&](ProjectEvent&& event) {
        std::sort(event.members.begin(), event.members.end());
        const auto last = std::unique(event.members.begin(), event.members.end());
        stats.duplicate_members +=
            static_cast<std::uint64_t>(event.members.end() - last);
        event.members.erase(last, event.members.end());
        ++stats.records_ok;
        sink(std::move(event));
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        if (format == EventFormat::csv && !saw_header) {
            saw_header = true;
            const auto cols = split(line, ',');
            if (cols.size() != 3 || trim(cols[0]) != "project_id" || trim(cols[1]) != "year" ||
                trim(cols[2]) != "members") {
                throw IngestError(path + " line 1: expected header project_id,year,members");
            }
            continue;
        }

        ProjectEvent event;
        if (format == EventFormat::jsonl) {
            const auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object()) {
                record_error(stats, line_no, "invalid JSON object");
                continue;
            }
            const auto pid = j.find("project_id");
            const auto year = j.find("year");
            const auto members = j.find("members");
            if (pid == j.end() || !pid->is_string()) {
                record_error(stats, line_no, "missing string field 'project_id'");
                continue;
            }
            if (year == j.end() || !year->is_number_integer()) {
                record_error(stats, line_no, "missing integer field 'year'");
                continue;
            }
            const auto y = year->get<std::int64_t>();
            if (y < std::numeric_limits<Year>::min() || y > std::numeric_limits<Year>::max()) {
                record_error(stats, line_no, "year out of range");
                continue;
            }
            if (members == j.end() || !members->is_array() || members->empty()) {
                record_error(stats, line_no, "missing non-empty array field 'members'");
                continue;
            }
            bool ok = true;
            for (const auto& m : *members) {
                if (!m.is_string() || m.get_ref<const std::string&>().empty()) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                record_error(stats, line_no, "members must be non-empty strings");
                continue;
            }
            event.project_id = pid->get<std::string>();
            event.completion_year = static_cast<Year>(y);
            event.members.reserve(members->size());
            for (const auto& m : *members) {
                event.members.push_back(dict.intern(m.get_ref<const std::string&>()));
            }
        } else {
            const auto cols = split(line, ',');
            if (cols.size() != 3) {
                record_error(stats, line_no, "expected 3 columns");
                continue;
            }
            const std::string pid = trim(cols[0]);
            if (pid.empty()) {
                record_error(stats, line_no, "empty project_id");
                continue;
            }
            std::int64_t y = 0;
            if (!parse_int(cols[1], y) || y < std::numeric_limits<Year>::min() ||
                y > std::numeric_limits<Year>::max()) {
                record_error(stats, line_no, "invalid year");
                continue;
            }
            const auto member_keys = split(cols[2], ';');
            bool ok = !member_keys.empty();
            std::vector<ContributorId> ids;
            ids.reserve(member_keys.size());
            for (const auto& raw : member_keys) {
                const std::string key = trim(raw);
                if (key.empty()) {
                    ok = false;
                    break;
                }
                ids.push_back(dict.intern(key));
            }
            if (!ok || ids.empty()) {
                record_error(stats, line_no, "members must be ';'-separated non-empty keys");
                continue;
            }
            event.project_id = pid;
            event.completion_year = static_cast<Year>(y);
            event.members = std::move(ids);
        }
        finish_event(std::move(event));
    }

    const std::uint64_t total = stats.records_ok + stats.records_malformed;
    if (total > 0) {
        const double frac = static_cast<double>(stats.records_malformed) /
                            static_cast<double>(total);
        if (frac > options.max_malformed_fraction) {
            std::string msg = path + ": " + std::to_string(stats.records_malformed) + " of " +
                              std::to_string(total) + " records malformed (limit " +
                              std::to_string(options.max_malformed_fraction * 100.0) + "%)";
            for (const auto& sample : stats.error_samples) msg += "\n  " + sample;
            throw IngestError(msg);
        }
    }
    return stats;
}

PopulationTable parse_population(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open population file: " + path);
    PopulationTable table;
    std::string line;
    std::uint64_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (!saw_header) {
            saw_header = true;
            if (cols.size() != 2 || trim(cols[0]) != "year" || trim(cols[1]) != "population") {
                throw IngestError(path + " line 1: expected header year,population");
            }
            continue;
        }
        std::int64_t year = 0;
        double value = 0.0;
        if (cols.size() != 2 || !parse_int(cols[0], year) || !parse_num(cols[1], value)) {
            throw IngestError(path + " line " + std::to_string(line_no) +
                              ": expected year,population");
        }
        if (table.anchors().count(static_cast<Year>(year))) {
            throw IngestError(path + " line " + std::to_string(line_no) + ": duplicate year " +
                              std::to_string(year));
        }
        try {
            table.set(static_cast<Year>(year), value);
        } catch (const Error& e) {
            throw IngestError(path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

std::vector<EpochDefinition> parse_epochs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open epochs file: " + path);
    std::vector<EpochDefinition> epochs;
    std::string line;
    std::uint64_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (!saw_header) {
            saw_header = true;
            if (cols.size() != 3 || trim(cols[0]) != "name" || trim(cols[1]) != "start" ||
                trim(cols[2]) != "end") {
                throw IngestError(path + " line 1: expected header name,start,end");
            }
            continue;
        }
        std::int64_t start = 0;
        std::int64_t end = 0;
        const std::string name = trim(cols.empty() ? "" : cols[0]);
        if (cols.size() != 3 || name.empty() || !parse_int(cols[1], start) ||
            !parse_int(cols[2], end)) {
            throw IngestError(path + " line " + std::to_string(line_no) +
                              ": expected name,start,end");
        }
        if (end < start) {
            throw IngestError(path + " line " + std::to_string(line_no) + ": epoch '" + name +
                              "' ends before it starts");
        }
        epochs.push_back({name, static_cast<Year>(start), static_cast<Year>(end)});
    }
    return epochs;
}

void write_events_jsonl(const std::string& path, const std::vector<ProjectEvent>& events,
                        const std::string& member_prefix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    std::string buf;
    buf.reserve(1 << 20);
    for (const auto& event : events) {
        buf += "{\"project_id\":\"";
        json_escape_into(buf, event.project_id);
        buf += "\",\"year\":";
        buf += std::to_string(event.completion_year);
        buf += ",\"members\":[";
        for (std::size_t i = 0; i < event.members.size(); ++i) {
            if (i) buf += ',';
            buf += '"';
            json_escape_into(buf, member_prefix);
            buf += std::to_string(event.members[i]);
            buf += '"';
        }
        buf += "]}\n";
        if (buf.size() > (1 << 20) - 4096) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write failed: " + path);
}

YearlySeries read_series_csv(const std::string& path, const std::string& year_column,
                             const std::string& value_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open series file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": empty series file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    std::size_t year_idx = header.size();
    std::size_t value_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == year_column) year_idx = i;
        if (trim(header[i]) == value_column) value_idx = i;
    }
    if (year_idx == header.size()) throw Error(path + ": no column '" + year_column + "'");
    if (value_idx == header.size()) throw Error(path + ": no column '" + value_column + "'");
    YearlySeries series;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() <= std::max(year_idx, value_idx)) {
            throw Error(path + " line " + std::to_string(line_no) + ": too few columns");
        }
        if (trim(cols[value_idx]).empty()) continue;
        std::int64_t year = 0;
        double value = 0.0;
        if (!parse_int(cols[year_idx], year) || !parse_num(cols[value_idx], value)) {
            throw Error(path + " line " + std::to_string(line_no) + ": invalid numeric cell");
        }
        series.set(static_cast<Year>(year), value);
    }
    return series;
}

void write_id_dictionary(const std::string& path, const IdDictionary& dict) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << "id,key\n";
    const auto& keys = dict.keys();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        std::string key = keys[i];
        if (key.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : key) {
                if (c == '"') quoted += "\"\"";
                else quoted += c;
            }
            quoted += '"';
            key = quoted;
        }
        out << i << ',' << key << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + path);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = seed;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    char buf[65536];
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    while (in) {
        in.read(buf, sizeof buf);
        const auto got = in.gcount();
        if (got > 0) hash = fnv1a(buf, static_cast<std::size_t>(got), hash);
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

}  // namespace collab
