#pragma once

// Flooding Path Probability: the probability that a packet flooded from a
// source along the DAG reaches each node, i.e. that a directed path of
// successful links exists.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "meshrel/graph.hpp"

namespace meshrel {

inline constexpr std::size_t kDefaultBruteforceEdgeCap = 20;
inline constexpr std::size_t kDefaultCutCap = 25;
// Subsets of the cut are indexed by 64-bit words, and 2^cap doubles must fit in memory.
inline constexpr std::size_t kMaxCutCap = 34;

// Joint distribution over which members of a vertex cut hold the packet.
// Bit i of a subset index refers to cut[i].
struct CutDistribution {
    std::vector<NodeId> cut;
    std::vector<double> pmf;  // size 2^cut.size()

    double total() const;
    // Probability that every node in subset `mask` has the packet and no other cut member does.
    double operator[](std::uint64_t mask) const { return pmf.at(mask); }
};

// One iteration of the vertex-cut dynamic program, reported after the added
// node's probability is read off and before finished nodes are marginalized.
struct FppStep {
    NodeId target;  // cut node whose outgoing links are being consumed
    NodeId added;   // node added to the cut
    const CutDistribution& state;
    std::vector<NodeId> removed;  // nodes marginalized out afterwards
};

struct FppOptions {
    std::size_t cut_cap = kDefaultCutCap;
    std::function<void(const FppStep&)> on_step;
};

// Exhaustive sum over all 2^E link up/down states. Exponential; refuses graphs
// with more than edge_cap edges.
MetricTable fpp_bruteforce(const Dodag& g, NodeId source,
                           std::size_t edge_cap = kDefaultBruteforceEdgeCap);

// Vertex-cut dynamic program. Grows a cut from the source, tracking the joint
// pmf of packet reception over the cut; cost is exponential only in the
// largest cut. Nodes not reachable from the source score 0.
// Throws CapExceeded if a cut would exceed options.cut_cap.
MetricTable fpp_fast(const Dodag& g, NodeId source, const FppOptions& options = {});

// Size of the largest cut fpp_fast would use, without computing the pmf.
std::size_t fpp_max_cut_size(const Dodag& g, NodeId source);

struct MetricBounds {
    MetricTable lo;
    MetricTable hi;
};

// FPP is monotone in every link probability, so evaluating at all-lower and
// all-upper probabilities brackets it.
MetricBounds fpp_bounds(const IntervalGraph& g, NodeId source, const FppOptions& options = {});

}  // namespace meshrel
