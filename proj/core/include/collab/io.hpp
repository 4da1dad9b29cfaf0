#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "collab/types.hpp"
#include "collab/yearly_series.hpp"

namespace collab {

enum class EventFormat { infer, jsonl, csv };

// String contributor keys -> dense ids, in first-appearance order. The
// table is persisted next to the aggregate cache so ids stay stable.
class IdDictionary {
  public:
    ContributorId intern(const std::string& key);
    const std::string& key(ContributorId id) const { return keys_[id]; }
    std::size_t size() const { return keys_.size(); }
    const std::vector<std::string>& keys() const { return keys_; }

  private:
    std::unordered_map<std::string, ContributorId> index_;
    std::vector<std::string> keys_;
};

struct ParseStats {
    std::uint64_t records_ok = 0;
    std::uint64_t records_malformed = 0;
    std::uint64_t duplicate_members = 0;      // members dropped by dedup
    std::vector<std::string> error_samples;   // first few malformed lines, with line numbers
};

struct ParseOptions {
    EventFormat format = EventFormat::infer;
    double max_malformed_fraction = 0.01;
};

// Streaming parse: each valid record is handed to the sink and never
// retained, so memory is bounded by the dictionary, not the file.
// JSONL: {"project_id":"p1","year":2000,"members":["a","b"]}
// CSV: header project_id,year,members with members ';'-separated.
// Malformed records are rejected with line numbers; exceeding
// max_malformed_fraction at end of file is fatal (IngestError).
ParseStats parse_events(const std::string& path, IdDictionary& dict,
                        const std::function<void(ProjectEvent&&)>& sink,
                        const ParseOptions& options = {});

// CSV with header year,population. Duplicate years and non-numeric rows are
// fatal with line numbers; row order is free.
PopulationTable parse_population(const std::string& path);

// CSV with header name,start,end (inclusive years).
std::vector<EpochDefinition> parse_epochs(const std::string& path);

// Standard event emission (JSONL, members as string keys). Deterministic:
// events are written in the order given.
void write_events_jsonl(const std::string& path, const std::vector<ProjectEvent>& events,
                        const std::string& member_prefix = "c");

// One column of a headered CSV as a year-indexed series; empty cells are
// skipped. Used by report consumers and round-trip tests.
YearlySeries read_series_csv(const std::string& path, const std::string& year_column,
                             const std::string& value_column);

void write_id_dictionary(const std::string& path, const IdDictionary& dict);

std::string slurp_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit content hashes; the cache key and manifest fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a_file(const std::string& path);
std::string hex64(std::uint64_t value);

}  // namespace collab
