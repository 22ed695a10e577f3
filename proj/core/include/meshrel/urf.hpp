#pragma once

// Unicast Retransmission Flow metric. A relay holding the packet tries each of
// its outgoing links once, in uniformly random order, until one succeeds; the
// packet is dropped when all fail. The URF weight of a link is the probability
// that a packet at its tail leaves over it.
//
// The RRURF variant tries links in decreasing order of the downstream
// neighbor's metric instead.

#include <cstddef>
#include <span>
#include <vector>

#include "meshrel/graph.hpp"

namespace meshrel {

inline constexpr std::size_t kDefaultSubsetOutDegreeCap = 20;

// Link weights from the subset sum over which sibling links are up. Cost is
// O(k 2^k) for k links; refuses more than cap links.
std::vector<double> urf_weights_subset(std::span<const double> link_p,
                                       std::size_t cap = kDefaultSubsetOutDegreeCap);

// Same weights as p_l * integral_0^1 prod_{e != l} (1 - p_e x) dx, expanding
// the product into polynomial coefficients. O(k^2) per link.
std::vector<double> urf_weights_poly(std::span<const double> link_p);

// p * integral_0^1 prod_e (1 - q_e x) dx for one link with siblings q.
double urf_link_weight(double p, std::span<const double> sibling_p);

// Weights of the outgoing links of node u, aligned with g.out_edges(u).
std::vector<double> urf_weights_subset(const Dodag& g, NodeId u,
                                       std::size_t cap = kDefaultSubsetOutDegreeCap);
std::vector<double> urf_weights_poly(const Dodag& g, NodeId u);

// Per-edge weights, indexed like g.edges().
struct WeightTable {
    std::vector<double> weight;

    // Probability that a packet at u is dropped: 1 - sum of u's outgoing weights.
    double drop_probability(const Dodag& g, NodeId u) const;
};

WeightTable urf_weight_table(const Dodag& g);

// Source-rooted recursion: visit probability of every node for a packet
// injected at source, accumulated in topological order.
MetricTable urf_source(const Dodag& g, NodeId source);
MetricTable urf_source(const Dodag& g, NodeId source, const WeightTable& weights);

// Sink-rooted recursion: delivery probability from every node to the sink,
// accumulated in reverse topological order. `sink` must be g.sink().
MetricTable urf_sink(const Dodag& g, NodeId sink);
MetricTable urf_sink(const Dodag& g, NodeId sink, const WeightTable& weights);

// Outgoing links of u ordered for RRURF forwarding, given downstream metric
// values: metric descending, then link probability descending, then neighbor
// id ascending. Returns indices into g.edges().
std::vector<std::size_t> rrurf_link_order(const Dodag& g, NodeId u,
                                          std::span<const double> downstream_metric);

// Weights prod_{k<i} (1 - p_k) * p_i for links already in trial order.
std::vector<double> rrurf_weights(std::span<const double> ordered_p);

MetricTable rrurf_sink(const Dodag& g, NodeId sink);

struct UrfBounds {
    MetricTable lo;
    MetricTable hi;
    WeightTable weight_lo;
    WeightTable weight_hi;
    // Nodes whose upper-bound weights sum above 1; the upper metric bound is
    // loose there.
    std::vector<NodeId> overweight_nodes;

    bool overweight() const noexcept { return !overweight_nodes.empty(); }
};

// Bounds by substitution: a link's upper weight uses its own upper probability
// and its siblings' lower probabilities, and vice versa for the lower weight.
UrfBounds urf_bounds(const IntervalGraph& g, NodeId sink);

}  // namespace meshrel
