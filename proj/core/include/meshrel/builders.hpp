#pragma once

// Routing topology construction from an undirected connectivity graph.
//
// All builders orient links so that packets flow toward the sink without
// loops: every link goes from a higher mesh hop count to a lower one, or
// between equal hop counts in a strict order that cannot cycle.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "meshrel/graph.hpp"

namespace meshrel {

enum class SelectMode {
    exact,  // best of all non-empty subsets of the candidates
    lex,    // one greedy pass in (metric, link probability) order
};

std::string_view select_mode_name(SelectMode mode) noexcept;

inline constexpr std::size_t kExactSelectCap = 15;

struct Candidate {
    NodeId id = 0;
    double metric = 0.0;  // candidate's URF metric to the sink
    double p = 0.0;       // probability of the link to it
};

struct Selection {
    std::vector<NodeId> chosen;  // sorted by id
    double metric = 0.0;         // resulting URF metric of the selecting node
};

// URF metric of a node whose outgoing links go to exactly these candidates.
double urf_via(std::span<const Candidate> links);

// Downstream neighbor set maximizing the node's URF metric. Exact mode breaks
// ties toward fewer links, then the lexicographically smallest id list. Lex
// mode adds a candidate only if it raises the metric by more than 1e-12; when
// no candidate raises it (all candidate metrics or probabilities zero) the
// first candidate in lex order is kept so the node still has a route.
// Throws CapExceeded for exact mode with more than kExactSelectCap candidates.
Selection select_downstream(std::span<const Candidate> candidates, SelectMode mode);

// Join thresholds for the delayed-threshold builder.
struct ThresholdSchedule {
    std::vector<double> tau;  // non-increasing
    int rounds = 1;

    // Threshold for index m (1-based); m past the end reuses the last entry.
    double at(int m) const;
};

// Parses "start:step:end" (e.g. "1:-0.01:0") or a comma list ("0.9,0.8,0.5").
// Throws if the result is empty, outside [0,1] or increasing anywhere.
std::vector<double> parse_thresholds(std::string_view text);
ThresholdSchedule make_schedule(std::vector<double> tau, int rounds);

struct BuildResult {
    Dodag topology;
    std::vector<std::optional<int>> hop;         // mesh hop count; nullopt if never joined
    std::vector<std::optional<int>> join_round;  // step or round of joining
    std::vector<double> urf;                     // URF metric on the final topology

    bool joined(NodeId v) const { return hop.at(static_cast<std::size_t>(v)).has_value(); }
    int joined_count() const;
};

// Orients links by breadth-first hop distance to the sink. Equal-hop links point
// from the node whose best link to the lower level is weaker; exact ties drop
// the link. Nodes outside the sink's component stay unjoined.
BuildResult build_minhop(const ConnectivityGraph& cg, NodeId sink);

// Centralized greedy: repeatedly admits the unjoined node with the highest
// achievable URF metric over already-joined neighbors (smallest id on ties).
BuildResult build_urf_gg(const ConnectivityGraph& cg, NodeId sink,
                         SelectMode mode = SelectMode::lex);

struct DelayedThresholdOptions {
    SelectMode mode = SelectMode::lex;
    // Run the same-hop cross-link pass after every round (true) or once after
    // the last round (false).
    bool cross_links_each_round = true;
};

// Round-synchronous simulation of the distributed delayed-threshold builder.
// In round k a node may join at hop h only if its best achievable metric over
// neighbors below h reaches tau[k - h + 1]; joins become visible next round.
// Joined nodes then add links to same-hop neighbors with a strictly larger
// lower-hop-only metric when that raises their own.
BuildResult build_urf_dt(const ConnectivityGraph& cg, NodeId sink, const ThresholdSchedule& schedule,
                         const DelayedThresholdOptions& options = {});

}  // namespace meshrel
