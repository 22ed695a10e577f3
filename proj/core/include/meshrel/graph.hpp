#pragma once

// Graph representations shared by every module: the undirected connectivity
// graph that topology builders start from, the directed routing topology
// (DODAG) that metrics are evaluated on, and its interval-probability variant.
//
// Node ids are dense integers 0..node_count-1. All graph values are immutable
// after construction.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshrel/error.hpp"

namespace meshrel {

// Probabilities this far outside [0,1] are clamped; anything further is rejected.
inline constexpr double kProbabilitySlack = 1e-12;

// Clamps p into [0,1] if within kProbabilitySlack, otherwise throws.
double checked_probability(double p, std::string_view what);

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

struct UndirectedEdge {
    NodeId u = 0;
    NodeId v = 0;
    double p = 0.0;
};

struct Neighbor {
    NodeId id = 0;
    double p = 0.0;
};

class ConnectivityGraph {
public:
    ConnectivityGraph() = default;
    ConnectivityGraph(int node_count, std::vector<UndirectedEdge> edges,
                      std::vector<std::optional<Position>> positions = {});

    int node_count() const noexcept { return node_count_; }
    // Edges are stored with u < v, sorted by (u, v).
    std::span<const UndirectedEdge> edges() const noexcept { return edges_; }
    // Neighbors of v sorted by id.
    std::span<const Neighbor> neighbors(NodeId v) const;
    std::optional<double> link_probability(NodeId u, NodeId v) const;
    const std::vector<std::optional<Position>>& positions() const noexcept { return positions_; }
    std::optional<Position> position(NodeId v) const;

    bool connected() const;
    // Nodes reachable from root, as a membership mask.
    std::vector<bool> component_of(NodeId root) const;

private:
    int node_count_ = 0;
    std::vector<UndirectedEdge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::vector<std::optional<Position>> positions_;
};

struct DirectedEdge {
    NodeId from = 0;
    NodeId to = 0;
    double p = 0.0;
};

// Directed routing topology with a designated sink and optional source.
//
// Construction enforces structural invariants (ids in range, no self-loops, no
// parallel edges, probabilities in [0,1]). Acyclicity and the DODAG outdegree
// property are checked by validate_dodag(), so that malformed inputs can be
// reported rather than rejected outright.
class Dodag {
public:
    Dodag() = default;
    Dodag(int node_count, std::vector<DirectedEdge> edges, NodeId sink,
          std::optional<NodeId> source = std::nullopt);

    int node_count() const noexcept { return node_count_; }
    std::span<const DirectedEdge> edges() const noexcept { return edges_; }
    NodeId sink() const noexcept { return sink_; }
    std::optional<NodeId> source() const noexcept { return source_; }

    // Indices into edges(), ordered by the head (resp. tail) node id.
    std::span<const std::size_t> out_edges(NodeId v) const;
    std::span<const std::size_t> in_edges(NodeId v) const;

    int out_degree(NodeId v) const { return static_cast<int>(out_edges(v).size()); }
    int in_degree(NodeId v) const { return static_cast<int>(in_edges(v).size()); }
    int max_out_degree() const noexcept;
    int max_in_degree() const noexcept;

    std::optional<double> link_probability(NodeId from, NodeId to) const;
    bool contains(NodeId v) const noexcept { return v >= 0 && v < node_count_; }

    // Same topology with the edge probabilities replaced (aligned with edges()).
    Dodag with_probabilities(std::span<const double> p) const;

private:
    void check_node(NodeId v) const;

    int node_count_ = 0;
    std::vector<DirectedEdge> edges_;
    NodeId sink_ = 0;
    std::optional<NodeId> source_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

struct IntervalEdge {
    NodeId from = 0;
    NodeId to = 0;
    double p_lo = 0.0;
    double p_hi = 0.0;
};

// Dodag whose link probabilities are only known to lie in [p_lo, p_hi].
class IntervalGraph {
public:
    IntervalGraph() = default;
    IntervalGraph(int node_count, std::vector<IntervalEdge> edges, NodeId sink,
                  std::optional<NodeId> source = std::nullopt);

    // Degenerate intervals [p, p] around every edge of g.
    static IntervalGraph from_point(const Dodag& g);

    int node_count() const noexcept { return lower_.node_count(); }
    NodeId sink() const noexcept { return lower_.sink(); }
    std::optional<NodeId> source() const noexcept { return lower_.source(); }
    std::span<const IntervalEdge> edges() const noexcept { return edges_; }

    // The topology with every probability at its lower (upper) bound. Edge
    // indices of both graphs match edges().
    const Dodag& lower() const noexcept { return lower_; }
    const Dodag& upper() const noexcept { return upper_; }

private:
    std::vector<IntervalEdge> edges_;
    Dodag lower_;
    Dodag upper_;
};

enum class MetricKind { fpp, urf, rrurf, fpp_lo, fpp_hi, urf_lo, urf_hi };

std::string_view metric_kind_name(MetricKind kind) noexcept;

// Per-node reliability values. reference is the node whose value is 1 by
// definition (the source for FPP, the sink for URF/RRURF).
struct MetricTable {
    MetricKind kind = MetricKind::fpp;
    NodeId reference = 0;
    std::vector<double> values;
    std::vector<std::optional<int>> hop;

    double operator[](NodeId v) const { return values.at(static_cast<std::size_t>(v)); }
    std::size_t size() const noexcept { return values.size(); }
};

// ---------------------------------------------------------------------------
// Validation and traversal

enum class ViolationKind { cycle, sink_has_out_edge, orphan_node };

std::string_view violation_kind_name(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::vector<NodeId> nodes;  // cycle witness, offending sink or orphan
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ViolationKind kind) const noexcept;
};

struct ValidateOptions {
    // Nodes without any incident edge are not reported as orphans. Builders use
    // this for nodes that never joined the topology.
    bool allow_isolated = false;
};

ValidationReport validate_dodag(const Dodag& g, ValidateOptions options = {});

// Some directed cycle of g, or empty if g is acyclic.
std::vector<NodeId> find_cycle(const Dodag& g);

// Forward order: every edge goes from an earlier to a later node. Ties are
// broken by smallest id. Throws CycleError if g has a cycle.
std::vector<NodeId> topological_order(const Dodag& g);

struct NeighborSets {
    std::vector<NodeId> upstream;    // tails of incoming edges
    std::vector<NodeId> downstream;  // heads of outgoing edges
    std::vector<DirectedEdge> out_edges;
};

NeighborSets neighbor_sets(const Dodag& g, NodeId v);

// Number of hops along the longest directed path from each node to the sink;
// nullopt where the sink is unreachable.
std::vector<std::optional<int>> longest_hops_to_sink(const Dodag& g);

}  // namespace meshrel
