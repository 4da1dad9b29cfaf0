#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "collab/errors.hpp"
#include "collab/types.hpp"

namespace collab {

// Pairwise edges for one event: n(n-1)/2 canonical (u < v) edges, each active
// over [completion_year - tau_project, completion_year]. A 1-member event
// yields an empty list.
std::vector<TemporalEdge> clique_expand(const ProjectEvent& event, Year tau_project);

// Inclusive span of a pair's whole history: (last end - first start) + 1.
std::uint32_t pair_duration(const PairTimeline& timeline);
std::uint32_t pair_duration(std::span<const YearInterval> intervals);

struct ActiveCounts {
    std::uint64_t active_nodes{};
    std::uint64_t active_edges{};
};

struct DurationCount {
    std::uint64_t complete{};
    std::uint64_t censored{};  // timeline still active in the final dataset year

    bool operator==(const DurationCount&) const = default;
};

// Every per-year table the analysis modules consume, precomputed once at
// graph finalization. Node/edge years follow edge time (creation shifted by
// tau_project); event tables use raw completion years.
struct YearlyAggregates {
    Year first_year{};  // dataset span covered by edge intervals
    Year last_year{};

    std::map<Year, std::uint64_t> new_nodes;               // first_active_year == t
    std::map<Year, std::uint64_t> removed_nodes;           // last_active_year == t
    std::map<Year, std::uint64_t> active_new_edge_nodes;   // >=1 incident edge with t_create == t
    std::map<Year, std::uint64_t> active_nodes;            // some incident interval contains t
    std::map<Year, std::uint64_t> active_edges;            // some timeline interval contains t
    std::map<Year, std::uint64_t> new_timelines;           // pair first became active at t
    std::map<Year, std::uint64_t> ended_timelines;         // pair last active year == t
    std::map<Year, std::uint64_t> single_year_nodes;       // first_active == last_active == t

    // Event-based (completion-year) tables.
    std::map<Year, std::uint64_t> event_counts;
    std::map<Year, std::map<std::uint32_t, std::uint64_t>> team_size_hist;  // uncapped size -> events
    std::map<Year, std::uint64_t> single_project_nodes;  // exactly one event, completed at t
    std::map<Year, std::uint64_t> first_event_nodes;     // first event completed at t

    // Per-year edge-addition histogram: distinct new partners k -> node count.
    std::map<Year, std::map<std::uint32_t, std::uint64_t>> edge_addition_hist;

    // Pair-duration cohorts keyed by timeline start year: duration -> counts.
    std::map<Year, std::map<std::uint32_t, DurationCount>> duration_cohorts;

    std::uint64_t total_nodes{};         // contributors with >=1 edge
    std::uint64_t total_contributors{};  // contributors seen in any event (solo included)
    std::uint64_t total_timelines{};
    std::uint64_t total_events{};
    std::uint64_t rejected_year_records{};  // events outside the configured range

    bool operator==(const YearlyAggregates&) const = default;
};

// Immutable clique-expanded temporal graph. Pair timelines live in one flat
// interval array indexed per pair; lifespans are sorted by node id.
class TemporalGraph {
  public:
    struct TimelineRef {
        ContributorId u{};
        ContributorId v{};
        std::span<const YearInterval> intervals;
    };

    std::size_t timeline_count() const { return pairs_.size(); }
    TimelineRef timeline(std::size_t index) const;
    PairTimeline timeline_copy(std::size_t index) const;

    const std::vector<NodeLifespan>& lifespans() const { return lifespans_; }

    // Interval-containment activity. Years outside the dataset span answer
    // {0, 0} rather than erroring (queries past the data are meaningful).
    ActiveCounts active_counts(Year year) const;

    const YearlyAggregates& aggregates() const { return agg_; }
    Year first_year() const { return agg_.first_year; }
    Year last_year() const { return agg_.last_year; }
    Year tau_project() const { return tau_; }

  private:
    friend class GraphBuilder;

    struct PairEntry {
        std::uint64_t key{};  // u << 32 | v
        std::uint32_t offset{};
        std::uint32_t count{};
    };

    Year tau_{};
    std::vector<PairEntry> pairs_;
    std::vector<YearInterval> intervals_;  // flat storage, pairs_ indexes into it
    std::vector<NodeLifespan> lifespans_;
    YearlyAggregates agg_;
};

// Optional completion-year filter; events outside are counted, not ingested.
struct YearRange {
    Year min_year = -100000;
    Year max_year = 100000;
};

// Streaming accumulator. add() never stores events — only packed edge
// records and per-node/per-year tallies — so memory tracks nodes + edges,
// not input size. Shards may accumulate independently and merge(); finalize
// sorts everything, making the result independent of insertion order.
class GraphBuilder {
  public:
    explicit GraphBuilder(Year tau_project, YearRange range = {});

    enum class AddResult { added, rejected_year };

    // Throws IngestError on a duplicate project_id or empty member list.
    // Duplicate members within one event are deduplicated silently.
    AddResult add(const ProjectEvent& event);

    // Associative, commutative combine of two shards. Cross-shard duplicate
    // project ids are detected here (by content hash).
    void merge(GraphBuilder&& other);

    std::uint64_t events_added() const { return events_added_; }
    std::uint64_t events_rejected() const { return rejected_year_; }

    TemporalGraph finalize() &&;

  private:
    struct PackedEdge {
        std::uint64_t key;  // u << 32 | v, u < v
        Year year;          // completion year (t_remove); t_create = year - tau
    };
    struct NodeEventStats {
        Year first_event = 0;
        Year last_event = 0;
        std::uint32_t n_events = 0;
    };

    void note_member(ContributorId id, Year completion);

    Year tau_;
    YearRange range_;
    std::vector<PackedEdge> edges_;
    std::unordered_set<std::uint64_t> project_hashes_;
    std::vector<NodeEventStats> node_stats_;  // indexed by dense ContributorId
    std::map<Year, std::uint64_t> event_counts_;
    std::map<Year, std::map<std::uint32_t, std::uint64_t>> team_size_hist_;
    std::uint64_t events_added_ = 0;
    std::uint64_t rejected_year_ = 0;
    std::vector<ContributorId> scratch_members_;
};

// Convenience for tests and small batches.
TemporalGraph build_graph(const std::vector<ProjectEvent>& events, Year tau_project,
                          YearRange range = {});

}  // namespace collab
