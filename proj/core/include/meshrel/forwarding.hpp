#pragma once

// Monte-Carlo packet forwarding, independent of the analytic metrics. Each
// trial samples every link up or down once; the packet then either floods the
// DAG or is unicast hop by hop.

#include <cstdint>
#include <vector>

#include "meshrel/graph.hpp"

namespace meshrel {

enum class ForwardingModel {
    flood,             // every holder transmits once on all outgoing links
    urf_random_order,  // unicast, links tried once each in uniformly random order
    rr_ordered,        // unicast, links tried by descending downstream RRURF metric
};

std::string_view forwarding_model_name(ForwardingModel model) noexcept;

struct TrialConfig {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    ForwardingModel model = ForwardingModel::flood;
    NodeId source = 0;
    // Worker threads; 0 picks hardware concurrency. Results do not depend on it.
    unsigned threads = 1;
};

struct Estimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;

    double value() const noexcept;
    // sqrt(p(1-p)/trials) at the point estimate.
    double standard_error() const noexcept;
};

struct EstimateTable {
    ForwardingModel model = ForwardingModel::flood;
    NodeId source = 0;
    std::vector<Estimate> nodes;

    const Estimate& operator[](NodeId v) const { return nodes.at(static_cast<std::size_t>(v)); }
};

// Per-node fraction of trials in which the packet reached the node. Trial t
// draws from substream (seed, t), so the table is identical for any thread count.
EstimateTable simulate(const Dodag& g, const TrialConfig& cfg);

// Outcome of a single flooding trial for the given link states (indexed like
// g.edges()). Exposed for instrumentation.
std::vector<bool> flood_hits(const Dodag& g, NodeId source, const std::vector<bool>& link_up);

}  // namespace meshrel
