#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <vector>

#include "collab/graph.hpp"
#include "support/naive.hpp"

using namespace collab;

namespace {

ProjectEvent event(const std::string& id, Year year, std::vector<ContributorId> members) {
    return ProjectEvent{id, year, std::move(members)};
}

}  // namespace

TEST_CASE("clique expansion emits canonical pairwise edges over the active window") {
    const auto edges = clique_expand(event("p1", 2000, {4, 1, 3}), 2);
    REQUIRE(edges.size() == 3);
    CHECK(edges[0] == TemporalEdge{1, 3, {1998, 2000}});
    CHECK(edges[1] == TemporalEdge{1, 4, {1998, 2000}});
    CHECK(edges[2] == TemporalEdge{3, 4, {1998, 2000}});

    const auto tau0 = clique_expand(event("p2", 2000, {1, 2}), 0);
    REQUIRE(tau0.size() == 1);
    CHECK(tau0[0].active == YearInterval{2000, 2000});
}

TEST_CASE("clique expansion deduplicates members and rejects empty events") {
    const auto edges = clique_expand(event("p1", 1999, {3, 1, 3, 2, 1}), 1);
    CHECK(edges.size() == 3);  // of {1,2,3}, not of the raw 5-member list
    CHECK(clique_expand(event("solo", 1999, {7}), 1).empty());
    CHECK_THROWS_AS(clique_expand(event("none", 1999, {}), 1), IngestError);
}

TEST_CASE("pair timelines merge overlapping and touching intervals") {
    // tau 2: completions 2000 and 2003 give [1998,2000] + [2001,2003], which
    // touch and must fuse into one continuously-active interval.
    auto graph = build_graph({event("a", 2000, {1, 2}), event("b", 2003, {1, 2})}, 2);
    REQUIRE(graph.timeline_count() == 1);
    const auto fused = graph.timeline_copy(0);
    CHECK(fused.intervals == std::vector<YearInterval>{{1998, 2003}});
    CHECK(pair_duration(fused) == 6);

    // Completions 2000 and 2004 leave a one-year hole: two intervals.
    auto gap = build_graph({event("a", 2000, {1, 2}), event("b", 2004, {1, 2})}, 2);
    REQUIRE(gap.timeline_count() == 1);
    const auto split = gap.timeline_copy(0);
    CHECK(split.intervals == std::vector<YearInterval>{{1998, 2000}, {2002, 2004}});
    CHECK(pair_duration(split) == 7);  // inclusive span across the hole
}

TEST_CASE("finalize is insensitive to event insertion order") {
    const std::vector<ProjectEvent> forward{event("a", 2004, {1, 2}), event("b", 2000, {1, 2}),
                                            event("c", 2002, {2, 3})};
    std::vector<ProjectEvent> backward(forward.rbegin(), forward.rend());
    CHECK(build_graph(forward, 2).aggregates() == build_graph(backward, 2).aggregates());
}

TEST_CASE("duplicate project ids are rejected, also across merged shards") {
    GraphBuilder builder(2);
    builder.add(event("p1", 2000, {1, 2}));
    CHECK_THROWS_AS(builder.add(event("p1", 2001, {3, 4})), IngestError);

    GraphBuilder left(2);
    GraphBuilder right(2);
    left.add(event("x", 2000, {1, 2}));
    right.add(event("x", 2005, {5, 6}));
    CHECK_THROWS_AS(left.merge(std::move(right)), IngestError);
}

TEST_CASE("events outside the year range are counted but not ingested") {
    GraphBuilder builder(1, YearRange{1990, 2000});
    CHECK(builder.add(event("in", 1995, {1, 2})) == GraphBuilder::AddResult::added);
    CHECK(builder.add(event("early", 1989, {3, 4})) == GraphBuilder::AddResult::rejected_year);
    CHECK(builder.add(event("late", 2001, {5, 6})) == GraphBuilder::AddResult::rejected_year);
    CHECK(builder.events_added() == 1);
    CHECK(builder.events_rejected() == 2);
    const auto graph = std::move(builder).finalize();
    CHECK(graph.aggregates().rejected_year_records == 2);
    CHECK(graph.aggregates().total_events == 1);
    CHECK(graph.aggregates().total_nodes == 2);
}

TEST_CASE("tau widens one-project lifespans past the single-year definition") {
    // One event, tau 2: the node is active 1998-2000, so it is not a
    // single-year node even though it has a single project.
    const auto wide = build_graph({event("p", 2000, {1, 2})}, 2).aggregates();
    CHECK(wide.single_year_nodes.empty());
    CHECK(wide.single_project_nodes == std::map<Year, std::uint64_t>{{2000, 2}});
    CHECK(wide.new_nodes == std::map<Year, std::uint64_t>{{1998, 2}});

    const auto tight = build_graph({event("p", 2000, {1, 2})}, 0).aggregates();
    CHECK(tight.single_year_nodes == std::map<Year, std::uint64_t>{{2000, 2}});
}

TEST_CASE("solo contributors count as contributors but not as nodes") {
    const auto agg =
        build_graph({event("solo", 2000, {9}), event("pair", 2001, {1, 2})}, 1).aggregates();
    CHECK(agg.total_contributors == 3);
    CHECK(agg.total_nodes == 2);
    CHECK(agg.first_event_nodes == std::map<Year, std::uint64_t>{{2000, 1}, {2001, 2}});
    // Node tables never see the solo id.
    CHECK(agg.new_nodes == std::map<Year, std::uint64_t>{{2000, 2}});
}

TEST_CASE("edge additions count distinct new partners per creation year") {
    // Node 1 meets 2 and 3 in events completing 2000 (created 1998, tau 2),
    // and meets 2 again in 2001 (created 1999): the repeat pair counts as a
    // new edge in its own creation year, and partner dedup is within-year.
    const auto agg = build_graph({event("a", 2000, {1, 2}), event("b", 2000, {1, 3}),
                                  event("c", 2001, {1, 2})},
                                 2)
                         .aggregates();
    const std::map<Year, std::map<std::uint32_t, std::uint64_t>> want{
        {1998, {{1, 2}, {2, 1}}},  // nodes 2,3 gained one partner; node 1 gained two
        {1999, {{1, 2}}},          // the repeat 1-2 edge creates again for both ends
    };
    CHECK(agg.edge_addition_hist == want);
    CHECK(agg.active_new_edge_nodes == std::map<Year, std::uint64_t>{{1998, 3}, {1999, 2}});
}

TEST_CASE("within-year repeats of one pair count a single new partner") {
    const auto agg =
        build_graph({event("a", 2000, {1, 2}), event("b", 2000, {2, 1})}, 0).aggregates();
    CHECK(agg.edge_addition_hist ==
          std::map<Year, std::map<std::uint32_t, std::uint64_t>>{{2000, {{1, 2}}}});
}

TEST_CASE("active counts answer zero outside the dataset span") {
    const auto graph = build_graph({event("p", 2000, {1, 2})}, 2);
    CHECK(graph.active_counts(1997).active_nodes == 0);
    CHECK(graph.active_counts(1999).active_nodes == 2);
    CHECK(graph.active_counts(1999).active_edges == 1);
    CHECK(graph.active_counts(2001).active_edges == 0);
}

TEST_CASE("duration cohorts split complete and censored timelines") {
    // Pair (1,2) ends in 2000, well before the dataset's last year 2005;
    // pair (3,4) is still active in the final year and must be censored.
    const auto agg = build_graph({event("a", 2000, {1, 2}), event("b", 2005, {3, 4})}, 1)
                         .aggregates();
    REQUIRE(agg.duration_cohorts.count(1999) == 1);
    REQUIRE(agg.duration_cohorts.count(2004) == 1);
    CHECK(agg.duration_cohorts.at(1999).at(2).complete == 1);
    CHECK(agg.duration_cohorts.at(1999).at(2).censored == 0);
    CHECK(agg.duration_cohorts.at(2004).at(2).complete == 0);
    CHECK(agg.duration_cohorts.at(2004).at(2).censored == 1);
}

TEST_CASE("builder rejects non-dense contributor ids and bad construction") {
    GraphBuilder builder(2);
    CHECK_THROWS_AS(builder.add(event("big", 2000, {1u << 31, 1})), IngestError);
    CHECK_THROWS_AS(GraphBuilder(-1), ConfigError);
    CHECK_THROWS_AS(GraphBuilder(2, YearRange{2000, 1990}), ConfigError);
}

TEST_CASE("random fixtures match the brute-force model exactly") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const Year tau = static_cast<Year>(seed % 4);
        const auto events = naive::random_events(seed, 120, 40, 1980, 2010);
        const auto graph = build_graph(events, tau);
        const std::string mismatch = naive::compare(graph, naive::scan(events, tau));
        INFO("seed ", seed, " tau ", tau, ": ", mismatch);
        CHECK(mismatch.empty());
    }
}

TEST_CASE("sharded builders merge to the single-builder result") {
    const auto events = naive::random_events(77, 150, 30, 1990, 2005);
    GraphBuilder whole(2);
    for (const auto& e : events) whole.add(e);

    GraphBuilder shard0(2);
    GraphBuilder shard1(2);
    GraphBuilder shard2(2);
    for (std::size_t i = 0; i < events.size(); ++i) {
        (i % 3 == 0 ? shard0 : i % 3 == 1 ? shard1 : shard2).add(events[i]);
    }
    shard0.merge(std::move(shard1));
    shard0.merge(std::move(shard2));
    CHECK(std::move(shard0).finalize().aggregates() == std::move(whole).finalize().aggregates());

    GraphBuilder other_tau(3);
    GraphBuilder base(2);
    CHECK_THROWS_AS(base.merge(std::move(other_tau)), Error);
}
