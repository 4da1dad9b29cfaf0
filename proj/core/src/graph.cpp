#include "collab/graph.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

namespace collab {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t hash_bytes(const std::string& s) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

// Largest id accepted before we assume the caller skipped dense remapping.
constexpr ContributorId kMaxDenseId = (1u << 31) - 1;

std::vector<ContributorId> deduped_members(const ProjectEvent& event) {
    std::vector<ContributorId> members = event.members;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return members;
}

}  // namespace

std::vector<TemporalEdge> clique_expand(const ProjectEvent& event, Year tau_project) {
    if (event.members.empty()) {
        throw IngestError("event '" + event.project_id + "' has no members");
    }
    const std::vector<ContributorId> members = deduped_members(event);
    const YearInterval active{event.completion_year - tau_project, event.completion_year};
    std::vector<TemporalEdge> edges;
    edges.reserve(members.size() * (members.size() - 1) / 2);
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            edges.push_back(TemporalEdge{members[i], members[j], active});
        }
    }
    return edges;
}

std::uint32_t pair_duration(std::span<const YearInterval> intervals) {
    if (intervals.empty()) throw Error("pair timeline is empty");
    return static_cast<std::uint32_t>(intervals.back().end - intervals.front().start + 1);
}

std::uint32_t pair_duration(const PairTimeline& timeline) {
    return pair_duration(std::span<const YearInterval>(timeline.intervals));
}

TemporalGraph::TimelineRef TemporalGraph::timeline(std::size_t index) const {
    const PairEntry& p = pairs_.at(index);
    return TimelineRef{static_cast<ContributorId>(p.key >> 32),
                       static_cast<ContributorId>(p.key & 0xffffffffu),
                       std::span<const YearInterval>(intervals_.data() + p.offset, p.count)};
}

PairTimeline TemporalGraph::timeline_copy(std::size_t index) const {
    TimelineRef ref = timeline(index);
    PairTimeline out;
    out.u = ref.u;
    out.v = ref.v;
    out.intervals.assign(ref.intervals.begin(), ref.intervals.end());
    return out;
}

ActiveCounts TemporalGraph::active_counts(Year year) const {
    ActiveCounts counts;
    if (auto it = agg_.active_nodes.find(year); it != agg_.active_nodes.end()) {
        counts.active_nodes = it->second;
    }
    if (auto it = agg_.active_edges.find(year); it != agg_.active_edges.end()) {
        counts.active_edges = it->second;
    }
    return counts;
}

GraphBuilder::GraphBuilder(Year tau_project, YearRange range) : tau_(tau_project), range_(range) {
    if (tau_project < 0) throw ConfigError("tau_project must be >= 0");
    if (range.min_year > range.max_year) throw ConfigError("year range is inverted");
}

void GraphBuilder::note_member(ContributorId id, Year completion) {
    if (id > kMaxDenseId) {
        throw IngestError("contributor id " + std::to_string(id) +
                          " is not dense; remap ids at ingest");
    }
    if (id >= node_stats_.size()) node_stats_.resize(id + 1);
    NodeEventStats& s = node_stats_[id];
    if (s.n_events == 0) {
        s.first_event = completion;
        s.last_event = completion;
    } else {
        s.first_event = std::min(s.first_event, completion);
        s.last_event = std::max(s.last_event, completion);
    }
    ++s.n_events;
}

GraphBuilder::AddResult GraphBuilder::add(const ProjectEvent& event) {
    if (event.members.empty()) {
        throw IngestError("event '" + event.project_id + "' has no members");
    }
    const std::uint64_t id_hash = hash_bytes(event.project_id);
    if (!project_hashes_.insert(id_hash).second) {
        throw IngestError("duplicate project_id '" + event.project_id + "'");
    }
    if (event.completion_year < range_.min_year || event.completion_year > range_.max_year) {
        ++rejected_year_;
        return AddResult::rejected_year;
    }

    scratch_members_ = event.members;
    std::sort(scratch_members_.begin(), scratch_members_.end());
    scratch_members_.erase(std::unique(scratch_members_.begin(), scratch_members_.end()),
                           scratch_members_.end());

    const Year year = event.completion_year;
    ++events_added_;
    ++event_counts_[year];
    ++team_size_hist_[year][static_cast<std::uint32_t>(scratch_members_.size())];
    for (ContributorId id : scratch_members_) note_member(id, year);

    for (std::size_t i = 0; i < scratch_members_.size(); ++i) {
        const std::uint64_t hi = static_cast<std::uint64_t>(scratch_members_[i]) << 32;
        for (std::size_t j = i + 1; j < scratch_members_.size(); ++j) {
            edges_.push_back(PackedEdge{hi | scratch_members_[j], year});
        }
    }
    return AddResult::added;
}

void GraphBuilder::merge(GraphBuilder&& other) {
    if (other.tau_ != tau_) throw Error("cannot merge builders with different tau_project");
    const auto& small = other.project_hashes_.size() < project_hashes_.size()
                            ? other.project_hashes_
                            : project_hashes_;
    const auto& large = other.project_hashes_.size() < project_hashes_.size()
                            ? project_hashes_
                            : other.project_hashes_;
    for (std::uint64_t h : small) {
        if (large.count(h)) {
            throw IngestError("duplicate project_id across input shards (content hash " +
                              std::to_string(h) + "); re-run single-threaded to identify it");
        }
    }
    project_hashes_.insert(other.project_hashes_.begin(), other.project_hashes_.end());

    edges_.insert(edges_.end(), other.edges_.begin(), other.edges_.end());
    other.edges_.clear();
    other.edges_.shrink_to_fit();

    if (other.node_stats_.size() > node_stats_.size()) node_stats_.resize(other.node_stats_.size());
    for (std::size_t id = 0; id < other.node_stats_.size(); ++id) {
        const NodeEventStats& o = other.node_stats_[id];
        if (o.n_events == 0) continue;
        NodeEventStats& s = node_stats_[id];
        if (s.n_events == 0) {
            s = o;
        } else {
            s.first_event = std::min(s.first_event, o.first_event);
            s.last_event = std::max(s.last_event, o.last_event);
            s.n_events += o.n_events;
        }
    }
    for (const auto& [year, n] : other.event_counts_) event_counts_[year] += n;
    for (const auto& [year, hist] : other.team_size_hist_) {
        auto& mine = team_size_hist_[year];
        for (const auto& [size, n] : hist) mine[size] += n;
    }
    events_added_ += other.events_added_;
    rejected_year_ += other.rejected_year_;
}

TemporalGraph GraphBuilder::finalize() && {
    TemporalGraph graph;
    graph.tau_ = tau_;
    YearlyAggregates& agg = graph.agg_;

    agg.event_counts = std::move(event_counts_);
    agg.team_size_hist = std::move(team_size_hist_);
    agg.total_events = events_added_;
    agg.rejected_year_records = rejected_year_;

    for (std::size_t id = 0; id < node_stats_.size(); ++id) {
        const NodeEventStats& s = node_stats_[id];
        if (s.n_events == 0) continue;
        ++agg.total_contributors;
        ++agg.first_event_nodes[s.first_event];
        if (s.n_events == 1) ++agg.single_project_nodes[s.first_event];
    }

    if (edges_.empty()) {
        if (!agg.event_counts.empty()) {
            agg.first_year = agg.event_counts.begin()->first - tau_;
            agg.last_year = agg.event_counts.rbegin()->first;
        } else {
            agg.first_year = 0;
            agg.last_year = -1;
        }
        return graph;
    }

    std::sort(edges_.begin(), edges_.end(), [](const PackedEdge& a, const PackedEdge& b) {
        return a.key != b.key ? a.key < b.key : a.year < b.year;
    });

    Year global_last = std::numeric_limits<Year>::min();
    Year global_first = std::numeric_limits<Year>::max();
    for (const PackedEdge& e : edges_) {
        global_last = std::max(global_last, e.year);
        global_first = std::min(global_first, static_cast<Year>(e.year - tau_));
    }
    agg.first_year = global_first;
    agg.last_year = global_last;

    // Per-node counts of distinct new partners per creation year. Two tuples
    // per packed edge, deduplicated so repeat projects of one pair within a
    // year count once.
    {
        struct Tup {
            std::uint64_t node_year;  // node << 32 | biased year
            std::uint32_t partner;
        };
        auto bias = [](Year y) {
            return static_cast<std::uint32_t>(y) ^ 0x80000000u;
        };
        std::vector<Tup> tuples;
        tuples.reserve(edges_.size() * 2);
        for (const PackedEdge& e : edges_) {
            const auto u = static_cast<std::uint32_t>(e.key >> 32);
            const auto v = static_cast<std::uint32_t>(e.key & 0xffffffffu);
            const std::uint32_t yb = bias(e.year - tau_);
            tuples.push_back(Tup{(static_cast<std::uint64_t>(u) << 32) | yb, v});
            tuples.push_back(Tup{(static_cast<std::uint64_t>(v) << 32) | yb, u});
        }
        std::sort(tuples.begin(), tuples.end(), [](const Tup& a, const Tup& b) {
            return a.node_year != b.node_year ? a.node_year < b.node_year : a.partner < b.partner;
        });
        std::size_t i = 0;
        while (i < tuples.size()) {
            std::size_t j = i;
            std::uint32_t distinct = 0;
            std::uint32_t prev_partner = 0;
            bool first = true;
            while (j < tuples.size() && tuples[j].node_year == tuples[i].node_year) {
                if (first || tuples[j].partner != prev_partner) {
                    ++distinct;
                    prev_partner = tuples[j].partner;
                    first = false;
                }
                ++j;
            }
            const Year year =
                static_cast<Year>(static_cast<std::uint32_t>(tuples[i].node_year) ^ 0x80000000u);
            ++agg.edge_addition_hist[year][distinct];
            ++agg.active_new_edge_nodes[year];
            i = j;
        }
    }

    // Merge each pair's years into disjoint intervals (touching years fuse:
    // active 1998-2000 and 2001-2003 means continuously active).
    const std::size_t span = static_cast<std::size_t>(global_last - global_first + 1);
    std::vector<std::int64_t> diff_edges(span + 1, 0);
    {
        std::size_t i = 0;
        while (i < edges_.size()) {
            std::size_t j = i;
            const std::uint64_t key = edges_[i].key;
            const std::uint32_t offset = static_cast<std::uint32_t>(graph.intervals_.size());
            YearInterval cur{edges_[i].year - tau_, edges_[i].year};
            ++j;
            while (j < edges_.size() && edges_[j].key == key) {
                const YearInterval next{edges_[j].year - tau_, edges_[j].year};
                if (next.start <= cur.end + 1) {
                    cur.end = std::max(cur.end, next.end);
                } else {
                    graph.intervals_.push_back(cur);
                    cur = next;
                }
                ++j;
            }
            graph.intervals_.push_back(cur);
            const auto count = static_cast<std::uint32_t>(graph.intervals_.size() - offset);
            graph.pairs_.push_back(TemporalGraph::PairEntry{key, offset, count});

            const YearInterval first_iv = graph.intervals_[offset];
            const YearInterval last_iv = graph.intervals_.back();
            ++agg.new_timelines[first_iv.start];
            ++agg.ended_timelines[last_iv.end];
            const auto duration = static_cast<std::uint32_t>(last_iv.end - first_iv.start + 1);
            DurationCount& dc = agg.duration_cohorts[first_iv.start][duration];
            if (last_iv.end >= global_last) {
                ++dc.censored;
            } else {
                ++dc.complete;
            }
            for (std::uint32_t k = offset; k < offset + count; ++k) {
                const YearInterval& iv = graph.intervals_[k];
                ++diff_edges[iv.start - global_first];
                --diff_edges[iv.end - global_first + 1];
            }
            i = j;
        }
    }
    agg.total_timelines = graph.pairs_.size();

    // Node lifespans: intervals all share width tau, so the earliest start is
    // min(year) - tau and the latest end is max(year).
    {
        struct NodeSpan {
            Year first = std::numeric_limits<Year>::max();
            Year last = std::numeric_limits<Year>::min();
        };
        std::vector<NodeSpan> spans(node_stats_.size());
        for (const PackedEdge& e : edges_) {
            const auto u = static_cast<std::uint32_t>(e.key >> 32);
            const auto v = static_cast<std::uint32_t>(e.key & 0xffffffffu);
            const Year start = e.year - tau_;
            for (std::uint32_t node : {u, v}) {
                NodeSpan& s = spans[node];
                s.first = std::min(s.first, start);
                s.last = std::max(s.last, e.year);
            }
        }
        for (std::size_t id = 0; id < spans.size(); ++id) {
            const NodeSpan& s = spans[id];
            if (s.first > s.last) continue;
            graph.lifespans_.push_back(
                NodeLifespan{static_cast<ContributorId>(id), s.first, s.last});
            ++agg.new_nodes[s.first];
            ++agg.removed_nodes[s.last];
            if (s.first == s.last) ++agg.single_year_nodes[s.first];
        }
        agg.total_nodes = graph.lifespans_.size();
    }

    // Per-year distinct active nodes: merge each node's incident timeline
    // intervals, then difference-count coverage.
    {
        struct NodeInterval {
            std::uint32_t node;
            Year start;
            Year end;
        };
        std::vector<NodeInterval> nivs;
        nivs.reserve(graph.intervals_.size() * 2);
        for (const TemporalGraph::PairEntry& p : graph.pairs_) {
            const auto u = static_cast<std::uint32_t>(p.key >> 32);
            const auto v = static_cast<std::uint32_t>(p.key & 0xffffffffu);
            for (std::uint32_t k = p.offset; k < p.offset + p.count; ++k) {
                const YearInterval& iv = graph.intervals_[k];
                nivs.push_back(NodeInterval{u, iv.start, iv.end});
                nivs.push_back(NodeInterval{v, iv.start, iv.end});
            }
        }
        std::sort(nivs.begin(), nivs.end(), [](const NodeInterval& a, const NodeInterval& b) {
            if (a.node != b.node) return a.node < b.node;
            if (a.start != b.start) return a.start < b.start;
            return a.end < b.end;
        });
        std::vector<std::int64_t> diff_nodes(span + 1, 0);
        std::size_t i = 0;
        while (i < nivs.size()) {
            const std::uint32_t node = nivs[i].node;
            Year cur_start = nivs[i].start;
            Year cur_end = nivs[i].end;
            std::size_t j = i + 1;
            while (j < nivs.size() && nivs[j].node == node) {
                if (nivs[j].start <= cur_end) {
                    cur_end = std::max(cur_end, nivs[j].end);
                } else {
                    ++diff_nodes[cur_start - global_first];
                    --diff_nodes[cur_end - global_first + 1];
                    cur_start = nivs[j].start;
                    cur_end = nivs[j].end;
                }
                ++j;
            }
            ++diff_nodes[cur_start - global_first];
            --diff_nodes[cur_end - global_first + 1];
            i = j;
        }
        std::int64_t running = 0;
        for (std::size_t s = 0; s < span; ++s) {
            running += diff_nodes[s];
            if (running > 0) {
                agg.active_nodes[global_first + static_cast<Year>(s)] =
                    static_cast<std::uint64_t>(running);
            }
        }
    }

    {
        std::int64_t running = 0;
        for (std::size_t s = 0; s < span; ++s) {
            running += diff_edges[s];
            if (running > 0) {
                agg.active_edges[global_first + static_cast<Year>(s)] =
                    static_cast<std::uint64_t>(running);
            }
        }
    }

    edges_.clear();
    edges_.shrink_to_fit();
    return graph;
}

TemporalGraph build_graph(const std::vector<ProjectEvent>& events, Year tau_project,
                          YearRange range) {
    GraphBuilder builder(tau_project, range);
    for (const ProjectEvent& event : events) builder.add(event);
    return std::move(builder).finalize();
}

}  // namespace collab
