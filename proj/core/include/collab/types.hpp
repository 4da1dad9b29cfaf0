#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace collab {

// Contributors are remapped to dense non-negative ids at ingest; the
// string-key dictionary lives with the ingest layer.
using ContributorId = std::uint32_t;
using Year = std::int32_t;

// One collaboration (paper / movie). Members are deduplicated and non-empty.
struct ProjectEvent {
    std::string project_id;
    Year completion_year{};
    std::vector<ContributorId> members;
};

// Closed year interval, inclusive on both ends.
struct YearInterval {
    Year start{};
    Year end{};

    bool contains(Year t) const { return start <= t && t <= end; }
    bool operator==(const YearInterval&) const = default;
};

// One pairwise edge produced by clique expansion. Canonical order u < v.
struct TemporalEdge {
    ContributorId u{};
    ContributorId v{};
    YearInterval active;

    bool operator==(const TemporalEdge&) const = default;
};

// Merged activity history of one contributor pair: disjoint, sorted intervals.
struct PairTimeline {
    ContributorId u{};
    ContributorId v{};
    std::vector<YearInterval> intervals;
};

struct NodeLifespan {
    ContributorId node{};
    Year first_active{};
    Year last_active{};
};

// Exogenously given historical window, inclusive of both endpoint years.
struct EpochDefinition {
    std::string name;
    Year start{};
    Year end{};
};

}  // namespace collab
