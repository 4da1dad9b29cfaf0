#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "collab/graph.hpp"
#include "collab/types.hpp"
#include "collab/yearly_series.hpp"

namespace collab {

struct NodeSeries {
    YearlySeries cumulative_total;        // nodes first active up to t
    YearlySeries active_with_new_edges;   // nodes incident to an edge created at t
    YearlySeries new_nodes;               // nodes first active at t
};

// Cumulative is defined on every year of the dataset span; the other two
// only where nonzero activity exists. The aggregate overloads serve cached
// runs that never rebuild the graph.
NodeSeries node_series(const TemporalGraph& graph);
NodeSeries node_series(const YearlyAggregates& agg);

// new(t) / participants-with-new-edges(t); years with denominator 0 omitted.
YearlySeries new_fraction_series(const TemporalGraph& graph);
YearlySeries new_fraction_series(const YearlyAggregates& agg);

struct SingleYearSeries {
    YearlySeries count;             // first_active == last_active == t
    YearlySeries fraction;          // count(t) / new(t), omitted where new(t) == 0
    YearlySeries variant_count;     // exactly one project, completed at t
    YearlySeries variant_fraction;  // variant_count(t) / first-project nodes(t)
};

// The interval definition is primary; the single-project variant is emitted
// alongside because tau_project > 0 widens every one-project lifetime.
SingleYearSeries single_year_series(const TemporalGraph& graph);
SingleYearSeries single_year_series(const YearlyAggregates& agg);

struct TeamSizeStats {
    Year year{};
    double mean{};
    std::uint32_t mode{};  // ties break toward the smallest size
    std::uint32_t max{};
};

struct EventSeries {
    YearlySeries event_count;
    // Fractions by team size; sizes >= cap are pooled into the cap bucket.
    // Fractions over a populated year sum to 1.
    std::map<std::uint32_t, YearlySeries> size_fractions;
    std::vector<TeamSizeStats> stats;  // mean/mode/max use uncapped sizes
};

EventSeries event_series(const TemporalGraph& graph, std::uint32_t size_cap = 10);
EventSeries event_series(const YearlyAggregates& agg, std::uint32_t size_cap = 10);
EventSeries event_series(const std::vector<ProjectEvent>& events, std::uint32_t size_cap = 10);

// Linear interpolation between anchors; outside the anchor range -> RangeError.
double interpolate_population(const PopulationTable& table, Year year);

// value(t) / population(t); propagates RangeError from interpolation.
YearlySeries per_capita(const YearlySeries& series, const PopulationTable& table);

}  // namespace collab
