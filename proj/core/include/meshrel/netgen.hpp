#pragma once

// Test topology generators: random geometric connectivity graphs and ladder
// (width x length grid) routing topologies.

#include <cstdint>

#include "meshrel/graph.hpp"

namespace meshrel {

// How likely a link is between the always-link and never-link radii.
enum class BandLaw {
    linear,    // (r2 - d) / (r2 - r1)
    constant,  // band_probability
};

struct GeoParams {
    int n = 40;
    double area = 10.0;         // side of the square placement area
    double min_spacing = 0.5;
    double r1 = 2.0;            // closer than this: always linked
    double r2 = 3.0;            // farther than this: never linked
    double p_lo = 0.7;          // link probabilities are uniform in [p_lo, p_hi]
    double p_hi = 1.0;
    BandLaw band = BandLaw::linear;
    double band_probability = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr int kMaxPlacementRejections = 100000;
inline constexpr int kMaxConnectivityAttempts = 100;

// Uniform placement with rejection of points closer than min_spacing, then
// links by distance band. Regenerates from derived seeds until the graph is
// connected. The sink of generated graphs is node 0.
ConnectivityGraph random_geometric(const GeoParams& params);

enum class LadderWiring {
    interleaved,  // every relay links to every relay of the next column
    disjoint,     // row r links only to row r of the next column
};

// Ladder topology: source 0, width x length relays, sink width*length + 1.
// Relay (column c, row r) has id 1 + c*width + r. All links have probability p.
Dodag ladder(int width, int length, double p, LadderWiring wiring = LadderWiring::interleaved);

}  // namespace meshrel
