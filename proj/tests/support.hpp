#pragma once

// Test-side oracles and graph generators. Nothing here calls into the metric
// code under test.

#include <cstdint>
#include <random>
#include <vector>

#include "meshrel/graph.hpp"

namespace meshrel::test {

// a=0 -> {1, 2} -> b=3, all links p; sink 3, source 0.
Dodag diamond(double p = 0.7);

// Chain 0 -> 1 -> ... -> n-1 with the given probabilities; sink n-1, source 0.
Dodag chain(const std::vector<double>& p);

struct RandomDagSpec {
    int min_nodes = 2;
    int max_nodes = 8;
    int max_edges = 12;
    double p_lo = 0.05;
    double p_hi = 1.0;
    bool shuffle_ids = true;
};

// Random DODAG: every non-sink node has a route to the sink, ids optionally
// shuffled so that id order says nothing about topological order. The source is
// a node with no incoming edges.
Dodag random_dodag(std::mt19937_64& rng, const RandomDagSpec& spec = {});

// Large random DODAG with outdegree <= max_out (at least 1 for non-sinks).
Dodag random_wide_dodag(std::mt19937_64& rng, int n, int max_out);

// Every DAG on n nodes whose edges go from a lower to a higher id, node n-1
// the sink (2^(n(n-1)/2) graphs), with probabilities drawn from rng.
std::vector<Dodag> all_forward_dags(int n, std::mt19937_64& rng);

// Reachability probability from source, by enumerating link states and
// running a plain DFS in each.
std::vector<double> oracle_fpp(const Dodag& g, NodeId source);

// URF weights by enumerating every trial order of the links and every up/down
// state: weight of link l = P(l is the first up link in the order).
std::vector<double> oracle_urf_weights(const std::vector<double>& p);

// RRURF weights for links already in trial order, by enumerating states.
std::vector<double> oracle_ordered_weights(const std::vector<double>& p);

// Delivery probability a -> b as a sum over all directed paths of the product
// of oracle URF weights along the path.
double oracle_urf_paths(const Dodag& g, NodeId a, NodeId b);

}  // namespace meshrel::test
