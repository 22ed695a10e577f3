#include "meshrel/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace meshrel {

double checked_probability(double p, std::string_view what) {
    if (std::isnan(p) || p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack) {
        throw Error(ErrorCode::validation,
                    fmt::format("{}: probability {} outside [0,1]", what, p));
    }
    return std::clamp(p, 0.0, 1.0);
}

namespace {

void check_id(NodeId v, int node_count, std::string_view what) {
    if (v < 0 || v >= node_count) {
        throw Error(ErrorCode::validation,
                    fmt::format("{}: node id {} outside 0..{}", what, v, node_count - 1));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ConnectivityGraph

ConnectivityGraph::ConnectivityGraph(int node_count, std::vector<UndirectedEdge> edges,
                                     std::vector<std::optional<Position>> positions)
    : node_count_(node_count), adjacency_(static_cast<std::size_t>(std::max(node_count, 0))) {
    if (node_count < 0) throw Error(ErrorCode::validation, "negative node count");
    if (!positions.empty() && positions.size() != static_cast<std::size_t>(node_count)) {
        throw Error(ErrorCode::validation, "position list does not match node count");
    }
    positions_ = std::move(positions);
    if (positions_.empty()) positions_.resize(static_cast<std::size_t>(node_count));

    for (auto& e : edges) {
        check_id(e.u, node_count, "edge");
        check_id(e.v, node_count, "edge");
        if (e.u == e.v) throw Error(ErrorCode::validation, fmt::format("self-loop at node {}", e.u));
        if (e.u > e.v) std::swap(e.u, e.v);
        e.p = checked_probability(e.p, fmt::format("edge {}-{}", e.u, e.v));
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
            throw Error(ErrorCode::validation,
                        fmt::format("duplicate edge {}-{}", edges[i].u, edges[i].v));
        }
    }
    edges_ = std::move(edges);
    for (const auto& e : edges_) {
        adjacency_[static_cast<std::size_t>(e.u)].push_back({e.v, e.p});
        adjacency_[static_cast<std::size_t>(e.v)].push_back({e.u, e.p});
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    }
}

std::span<const Neighbor> ConnectivityGraph::neighbors(NodeId v) const {
    check_id(v, node_count_, "neighbors");
    return adjacency_[static_cast<std::size_t>(v)];
}

std::optional<double> ConnectivityGraph::link_probability(NodeId u, NodeId v) const {
    for (const auto& n : neighbors(u)) {
        if (n.id == v) return n.p;
    }
    return std::nullopt;
}

std::optional<Position> ConnectivityGraph::position(NodeId v) const {
    check_id(v, node_count_, "position");
    return positions_[static_cast<std::size_t>(v)];
}

std::vector<bool> ConnectivityGraph::component_of(NodeId root) const {
    check_id(root, node_count_, "component_of");
    std::vector<bool> seen(static_cast<std::size_t>(node_count_), false);
    std::vector<NodeId> stack{root};
    seen[static_cast<std::size_t>(root)] = true;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (const auto& n : adjacency_[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(n.id)]) {
                seen[static_cast<std::size_t>(n.id)] = true;
                stack.push_back(n.id);
            }
        }
    }
    return seen;
}

bool ConnectivityGraph::connected() const {
    if (node_count_ == 0) return true;
    const auto seen = component_of(0);
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Dodag

Dodag::Dodag(int node_count, std::vector<DirectedEdge> edges, NodeId sink,
             std::optional<NodeId> source)
    : node_count_(node_count), sink_(sink), source_(source) {
    if (node_count < 1) throw Error(ErrorCode::validation, "routing topology needs at least one node");
    check_id(sink, node_count, "sink");
    if (source) check_id(*source, node_count, "source");

    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto& e : edges) {
        check_id(e.from, node_count, "edge");
        check_id(e.to, node_count, "edge");
        if (e.from == e.to) {
            throw Error(ErrorCode::validation, fmt::format("self-loop at node {}", e.from));
        }
        if (!seen.emplace(e.from, e.to).second) {
            throw Error(ErrorCode::validation,
                        fmt::format("parallel edge {}->{}", e.from, e.to));
        }
        e.p = checked_probability(e.p, fmt::format("edge {}->{}", e.from, e.to));
    }
    edges_ = std::move(edges);

    out_.resize(static_cast<std::size_t>(node_count));
    in_.resize(static_cast<std::size_t>(node_count));
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        out_[static_cast<std::size_t>(edges_[i].from)].push_back(i);
        in_[static_cast<std::size_t>(edges_[i].to)].push_back(i);
    }
    for (auto& list : out_) {
        std::sort(list.begin(), list.end(),
                  [this](std::size_t a, std::size_t b) { return edges_[a].to < edges_[b].to; });
    }
    for (auto& list : in_) {
        std::sort(list.begin(), list.end(),
                  [this](std::size_t a, std::size_t b) { return edges_[a].from < edges_[b].from; });
    }
}

void Dodag::check_node(NodeId v) const { check_id(v, node_count_, "node"); }

std::span<const std::size_t> Dodag::out_edges(NodeId v) const {
    check_node(v);
    return out_[static_cast<std::size_t>(v)];
}

std::span<const std::size_t> Dodag::in_edges(NodeId v) const {
    check_node(v);
    return in_[static_cast<std::size_t>(v)];
}

int Dodag::max_out_degree() const noexcept {
    std::size_t m = 0;
    for (const auto& l : out_) m = std::max(m, l.size());
    return static_cast<int>(m);
}

int Dodag::max_in_degree() const noexcept {
    std::size_t m = 0;
    for (const auto& l : in_) m = std::max(m, l.size());
    return static_cast<int>(m);
}

std::optional<double> Dodag::link_probability(NodeId from, NodeId to) const {
    for (auto i : out_edges(from)) {
        if (edges_[i].to == to) return edges_[i].p;
    }
    return std::nullopt;
}

Dodag Dodag::with_probabilities(std::span<const double> p) const {
    if (p.size() != edges_.size()) {
        throw Error(ErrorCode::validation, "probability vector does not match edge count");
    }
    auto edges = edges_;
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].p = p[i];
    return Dodag(node_count_, std::move(edges), sink_, source_);
}

// ---------------------------------------------------------------------------
// IntervalGraph

IntervalGraph::IntervalGraph(int node_count, std::vector<IntervalEdge> edges, NodeId sink,
                             std::optional<NodeId> source) {
    std::vector<DirectedEdge> lo;
    std::vector<DirectedEdge> hi;
    lo.reserve(edges.size());
    hi.reserve(edges.size());
    for (auto& e : edges) {
        const auto name = fmt::format("edge {}->{}", e.from, e.to);
        e.p_lo = checked_probability(e.p_lo, name);
        e.p_hi = checked_probability(e.p_hi, name);
        if (e.p_lo > e.p_hi) {
            throw Error(ErrorCode::validation,
                        fmt::format("{}: p_lo {} exceeds p_hi {}", name, e.p_lo, e.p_hi));
        }
        lo.push_back({e.from, e.to, e.p_lo});
        hi.push_back({e.from, e.to, e.p_hi});
    }
    edges_ = std::move(edges);
    lower_ = Dodag(node_count, std::move(lo), sink, source);
    upper_ = Dodag(node_count, std::move(hi), sink, source);
}

IntervalGraph IntervalGraph::from_point(const Dodag& g) {
    std::vector<IntervalEdge> edges;
    edges.reserve(g.edges().size());
    for (const auto& e : g.edges()) edges.push_back({e.from, e.to, e.p, e.p});
    return IntervalGraph(g.node_count(), std::move(edges), g.sink(), g.source());
}

// ---------------------------------------------------------------------------
// Names

std::string_view metric_kind_name(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::fpp: return "fpp";
        case MetricKind::urf: return "urf";
        case MetricKind::rrurf: return "rrurf";
        case MetricKind::fpp_lo: return "fpp_lo";
        case MetricKind::fpp_hi: return "fpp_hi";
        case MetricKind::urf_lo: return "urf_lo";
        case MetricKind::urf_hi: return "urf_hi";
    }
    return "unknown";
}

std::string_view violation_kind_name(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::cycle: return "cycle";
        case ViolationKind::sink_has_out_edge: return "sink_has_out_edge";
        case ViolationKind::orphan_node: return "orphan_node";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const noexcept {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

// ---------------------------------------------------------------------------
// Traversal

std::vector<NodeId> find_cycle(const Dodag& g) {
    enum : char { white, grey, black };
    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<char> color(n, white);
    std::vector<NodeId> parent(n, -1);

    for (NodeId root = 0; root < g.node_count(); ++root) {
        if (color[static_cast<std::size_t>(root)] != white) continue;
        // (node, next out-edge position)
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        color[static_cast<std::size_t>(root)] = grey;
        while (!stack.empty()) {
            auto& [u, pos] = stack.back();
            const auto out = g.out_edges(u);
            if (pos == out.size()) {
                color[static_cast<std::size_t>(u)] = black;
                stack.pop_back();
                continue;
            }
            const NodeId v = g.edges()[out[pos++]].to;
            if (color[static_cast<std::size_t>(v)] == grey) {
                std::vector<NodeId> cycle;
                for (NodeId w = u; w != v; w = parent[static_cast<std::size_t>(w)]) cycle.push_back(w);
                cycle.push_back(v);
                std::reverse(cycle.begin(), cycle.end());
                return cycle;
            }
            if (color[static_cast<std::size_t>(v)] == white) {
                color[static_cast<std::size_t>(v)] = grey;
                parent[static_cast<std::size_t>(v)] = u;
                stack.emplace_back(v, 0);
            }
        }
    }
    return {};
}

std::vector<NodeId> topological_order(const Dodag& g) {
    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<int> pending(n);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        pending[static_cast<std::size_t>(v)] = g.in_degree(v);
        if (pending[static_cast<std::size_t>(v)] == 0) ready.push(v);
    }
    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const NodeId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (auto i : g.out_edges(u)) {
            const NodeId v = g.edges()[i].to;
            if (--pending[static_cast<std::size_t>(v)] == 0) ready.push(v);
        }
    }
    if (order.size() != n) {
        auto cycle = find_cycle(g);
        std::string text;
        for (auto v : cycle) text += fmt::format("{} -> ", v);
        if (!cycle.empty()) text += std::to_string(cycle.front());
        throw CycleError(std::move(cycle), "graph has a directed cycle: " + text);
    }
    return order;
}

ValidationReport validate_dodag(const Dodag& g, ValidateOptions options) {
    ValidationReport report;
    if (auto cycle = find_cycle(g); !cycle.empty()) {
        std::string text;
        for (auto v : cycle) text += fmt::format("{} ", v);
        report.violations.push_back(
            {ViolationKind::cycle, std::move(cycle), "directed cycle through nodes " + text});
    }
    if (g.out_degree(g.sink()) > 0) {
        report.violations.push_back({ViolationKind::sink_has_out_edge,
                                     {g.sink()},
                                     fmt::format("sink {} has {} outgoing edge(s)", g.sink(),
                                                 g.out_degree(g.sink()))});
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (v == g.sink() || g.out_degree(v) > 0) continue;
        if (options.allow_isolated && g.in_degree(v) == 0) continue;
        report.violations.push_back({ViolationKind::orphan_node,
                                     {v},
                                     fmt::format("node {} has no outgoing edge", v)});
    }
    return report;
}

NeighborSets neighbor_sets(const Dodag& g, NodeId v) {
    if (!g.contains(v)) {
        throw Error(ErrorCode::validation, fmt::format("unknown node id {}", v));
    }
    NeighborSets sets;
    for (auto i : g.in_edges(v)) sets.upstream.push_back(g.edges()[i].from);
    for (auto i : g.out_edges(v)) {
        sets.downstream.push_back(g.edges()[i].to);
        sets.out_edges.push_back(g.edges()[i]);
    }
    return sets;
}

std::vector<std::optional<int>> longest_hops_to_sink(const Dodag& g) {
    const auto order = topological_order(g);
    std::vector<std::optional<int>> hops(static_cast<std::size_t>(g.node_count()));
    hops[static_cast<std::size_t>(g.sink())] = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeId u = *it;
        if (u == g.sink()) continue;
        std::optional<int> best;
        for (auto i : g.out_edges(u)) {
            if (const auto& h = hops[static_cast<std::size_t>(g.edges()[i].to)]) {
                best = std::max(best.value_or(0), *h + 1);
            }
        }
        hops[static_cast<std::size_t>(u)] = best;
    }
    return hops;
}

}  // namespace meshrel
