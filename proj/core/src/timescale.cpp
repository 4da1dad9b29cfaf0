#include "collab/timescale.hpp"

#include <cmath>

namespace collab {

namespace {

// Dense (total, rate) pair over the aggregate span from a sparse per-year
// count table, cut off after last_year - suppress_tail.
std::pair<YearlySeries, YearlySeries> stock_and_flow(const std::map<Year, std::uint64_t>& counts,
                                                     Year first, Year last, Year suppress_tail) {
    YearlySeries total;
    YearlySeries rate;
    const Year cutoff = last - suppress_tail;
    std::uint64_t running = 0;
    for (Year t = first; t <= last; ++t) {
        auto it = counts.find(t);
        const std::uint64_t n = it == counts.end() ? 0 : it->second;
        running += n;
        if (t > cutoff) continue;
        total.set(t, static_cast<double>(running));
        rate.set(t, static_cast<double>(n));
    }
    return {std::move(total), std::move(rate)};
}

double mean_over(const YearlySeries& series, Year first, Year last, std::size_t* count) {
    double sum = 0.0;
    std::size_t n = 0;
    for (Year t = first; t <= last; ++t) {
        if (!series.contains(t)) continue;
        sum += series.at(t);
        ++n;
    }
    *count = n;
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

YearlySeries timescale(const YearlySeries& total, const YearlySeries& rate) {
    if (total.years() != rate.years()) {
        throw AlignmentError("timescale inputs cover different year domains");
    }
    YearlySeries out;
    for (const auto& [year, t] : total.data()) {
        const double r = rate.at(year);
        if (r <= 0.0) continue;
        out.set(year, t / r);
    }
    return out;
}

TimescaleSeries process_timescales(const YearlyAggregates& agg, Year censor_window) {
    if (censor_window < 0) throw ConfigError("censor window must be >= 0");
    TimescaleSeries out;
    if (agg.first_year > agg.last_year) return out;
    const Year first = agg.first_year;
    const Year last = agg.last_year;

    {
        auto [total, rate] = stock_and_flow(agg.new_nodes, first, last, 0);
        out.tau_node_add = timescale(total, rate);
    }
    {
        auto [total, rate] = stock_and_flow(agg.removed_nodes, first, last, censor_window);
        out.tau_node_rem = timescale(total, rate);
    }
    {
        auto [total, rate] = stock_and_flow(agg.new_timelines, first, last, 0);
        out.tau_edge_add = timescale(total, rate);
    }
    {
        auto [total, rate] = stock_and_flow(agg.ended_timelines, first, last, censor_window);
        out.tau_edge_rem = timescale(total, rate);
    }
    for (const auto& [year, node_tau] : out.tau_node_add.data()) {
        if (!out.tau_edge_add.contains(year)) continue;
        out.ratio.set(year, node_tau / out.tau_edge_add.at(year));
    }
    return out;
}

TimescaleSeries process_timescales(const TemporalGraph& graph, Year censor_window) {
    return process_timescales(graph.aggregates(), censor_window);
}

ShockResponse shock_response(const TimescaleSeries& ts, const EpochDefinition& epoch,
                             Year baseline_window) {
    if (baseline_window < 1) throw ConfigError("baseline window must be >= 1");
    ShockResponse out;
    const auto change = [&](const YearlySeries& tau, const char* which) {
        std::size_t n_base = 0;
        const double base =
            mean_over(tau, epoch.start - baseline_window, epoch.start - 1, &n_base);
        if (n_base < 3) {
            throw InsufficientDataError(std::string("shock_response: fewer than 3 populated ") +
                                        which + " baseline years before " +
                                        std::to_string(epoch.start));
        }
        std::size_t n_epoch = 0;
        const double during = mean_over(tau, epoch.start, epoch.end, &n_epoch);
        if (n_epoch == 0) {
            throw InsufficientDataError(std::string("shock_response: no populated ") + which +
                                        " years inside epoch " + epoch.name);
        }
        return 100.0 * (during - base) / base;
    };
    out.tau_node_change_pct = change(ts.tau_node_add, "node");
    out.tau_edge_change_pct = change(ts.tau_edge_add, "edge");
    return out;
}

}  // namespace collab
