#pragma once

#include "collab/graph.hpp"
#include "collab/types.hpp"
#include "collab/yearly_series.hpp"

namespace collab {

// tau(t) = total(t) / rate(t); years with rate <= 0 are omitted. The two
// series must share an identical year domain (AlignmentError otherwise).
YearlySeries timescale(const YearlySeries& total, const YearlySeries& rate);

struct TimescaleSeries {
    YearlySeries tau_node_add;
    YearlySeries tau_node_rem;
    YearlySeries tau_edge_add;
    YearlySeries tau_edge_rem;
    YearlySeries ratio;  // tau_node_add / tau_edge_add
};

// Stock/flow timescales with same-year rates: nodes vs first-activations,
// removed nodes vs last-activations, pair timelines vs starts/ends. Removal
// years are right-censored near the dataset end, so both removal series are
// suppressed for the final censor_window years.
TimescaleSeries process_timescales(const TemporalGraph& graph, Year censor_window = 5);
TimescaleSeries process_timescales(const YearlyAggregates& agg, Year censor_window = 5);

struct ShockResponse {
    double tau_node_change_pct{};
    double tau_edge_change_pct{};
};

// Percent change of the epoch-mean addition timescales relative to their
// mean over the baseline_window years before the epoch. Requires >= 3
// populated baseline years per series (InsufficientDataError otherwise).
ShockResponse shock_response(const TimescaleSeries& ts, const EpochDefinition& epoch,
                             Year baseline_window = 5);

}  // namespace collab
