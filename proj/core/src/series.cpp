#include "collab/series.hpp"

#include <algorithm>

namespace collab {

namespace {

std::uint64_t value_at(const std::map<Year, std::uint64_t>& table, Year year) {
    auto it = table.find(year);
    return it == table.end() ? 0 : it->second;
}

EventSeries event_series_from_tables(
    const std::map<Year, std::uint64_t>& event_counts,
    const std::map<Year, std::map<std::uint32_t, std::uint64_t>>& size_hist,
    std::uint32_t size_cap) {
    if (size_cap < 1) throw ConfigError("size cap must be >= 1");
    EventSeries out;
    for (const auto& [year, count] : event_counts) {
        if (count == 0) continue;
        out.event_count.set(year, static_cast<double>(count));
    }
    for (const auto& [year, hist] : size_hist) {
        std::uint64_t events = 0;
        std::uint64_t members = 0;
        std::uint32_t mode = 0;
        std::uint64_t mode_count = 0;
        std::uint32_t max_size = 0;
        std::map<std::uint32_t, std::uint64_t> capped;
        for (const auto& [size, n] : hist) {
            if (n == 0) continue;
            events += n;
            members += static_cast<std::uint64_t>(size) * n;
            max_size = std::max(max_size, size);
            if (n > mode_count) {  // ascending scan: ties keep the smaller size
                mode_count = n;
                mode = size;
            }
            capped[std::min(size, size_cap)] += n;
        }
        if (events == 0) continue;
        for (const auto& [size, n] : capped) {
            out.size_fractions[size].set(year,
                                         static_cast<double>(n) / static_cast<double>(events));
        }
        out.stats.push_back(TeamSizeStats{year,
                                          static_cast<double>(members) / static_cast<double>(events),
                                          mode, max_size});
    }
    return out;
}

}  // namespace

NodeSeries node_series(const YearlyAggregates& agg) {
    NodeSeries out;
    for (const auto& [year, n] : agg.new_nodes) out.new_nodes.set(year, static_cast<double>(n));
    for (const auto& [year, n] : agg.active_new_edge_nodes) {
        out.active_with_new_edges.set(year, static_cast<double>(n));
    }
    std::uint64_t running = 0;
    for (Year t = agg.first_year; t <= agg.last_year; ++t) {
        running += value_at(agg.new_nodes, t);
        out.cumulative_total.set(t, static_cast<double>(running));
    }
    return out;
}

NodeSeries node_series(const TemporalGraph& graph) { return node_series(graph.aggregates()); }

YearlySeries new_fraction_series(const YearlyAggregates& agg) {
    YearlySeries out;
    for (const auto& [year, active] : agg.active_new_edge_nodes) {
        if (active == 0) continue;
        out.set(year, static_cast<double>(value_at(agg.new_nodes, year)) /
                          static_cast<double>(active));
    }
    return out;
}

YearlySeries new_fraction_series(const TemporalGraph& graph) {
    return new_fraction_series(graph.aggregates());
}

SingleYearSeries single_year_series(const YearlyAggregates& agg) {
    SingleYearSeries out;
    for (const auto& [year, fresh] : agg.new_nodes) {
        if (fresh == 0) continue;
        const std::uint64_t single = value_at(agg.single_year_nodes, year);
        out.count.set(year, static_cast<double>(single));
        out.fraction.set(year, static_cast<double>(single) / static_cast<double>(fresh));
    }
    for (const auto& [year, firsts] : agg.first_event_nodes) {
        if (firsts == 0) continue;
        const std::uint64_t single = value_at(agg.single_project_nodes, year);
        out.variant_count.set(year, static_cast<double>(single));
        out.variant_fraction.set(year, static_cast<double>(single) / static_cast<double>(firsts));
    }
    return out;
}

SingleYearSeries single_year_series(const TemporalGraph& graph) {
    return single_year_series(graph.aggregates());
}

EventSeries event_series(const YearlyAggregates& agg, std::uint32_t size_cap) {
    return event_series_from_tables(agg.event_counts, agg.team_size_hist, size_cap);
}

EventSeries event_series(const TemporalGraph& graph, std::uint32_t size_cap) {
    return event_series(graph.aggregates(), size_cap);
}

EventSeries event_series(const std::vector<ProjectEvent>& events, std::uint32_t size_cap) {
    std::map<Year, std::uint64_t> counts;
    std::map<Year, std::map<std::uint32_t, std::uint64_t>> hist;
    for (const ProjectEvent& event : events) {
        std::vector<ContributorId> members = event.members;
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        ++counts[event.completion_year];
        ++hist[event.completion_year][static_cast<std::uint32_t>(members.size())];
    }
    return event_series_from_tables(counts, hist, size_cap);
}

double interpolate_population(const PopulationTable& table, Year year) {
    return table.interpolate(year);
}

YearlySeries per_capita(const YearlySeries& series, const PopulationTable& table) {
    YearlySeries out;
    for (const auto& [year, value] : series.data()) {
        out.set(year, value / table.interpolate(year));
    }
    return out;
}

}  // namespace collab
