#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "collab/graph.hpp"
#include "collab/io.hpp"
#include "collab/types.hpp"

namespace collab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCacheEnvVar = "COLLABNET_CACHE";

struct RunConfig {
    std::string subcommand;  // ingest | series | timescales | fit | epochs | synth | report
    std::string events_path;
    std::string population_path;
    std::string epochs_path;
    std::string scenario_path;
    std::optional<std::uint64_t> seed;  // synth only: overrides the scenario file's seed
    std::string out_dir = ".";
    std::string cache_dir;  // empty: $COLLABNET_CACHE, else <out_dir>/cache
    EventFormat format = EventFormat::infer;
    Year tau_project = 2;
    Year censor_window = 5;
    unsigned threads = 1;
    std::uint32_t size_cap = 10;
    std::uint64_t min_fit_samples = 50;
    std::uint32_t xmin = 1;
    bool censoring = true;
    std::string growth_series = "events";  // events | new_nodes | cumulative_nodes
    Year min_year = -100000;
    Year max_year = 100000;
    double max_malformed_fraction = 0.01;
    Year baseline_window = 10;
    double tolerance_pct = 5.0;
};

// Orchestrates one subcommand run. Returns the process exit code:
// 0 success, 1 fatal input/config problem, 2 analysis steps failed partially
// (statuses recorded in output). Human-readable progress goes to `out`,
// failures to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Aggregate cache plumbing (exposed for tests). The key fingerprints the
// event file bytes, tau_project, the accepted year range, and the library
// version — any change forces a rebuild.
std::string cache_key(std::uint64_t events_hash, Year tau_project, Year min_year, Year max_year);
std::string serialize_aggregates(const YearlyAggregates& agg);
YearlyAggregates deserialize_aggregates(const std::string& json);

}  // namespace collab
