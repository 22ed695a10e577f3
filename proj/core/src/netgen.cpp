#include "meshrel/netgen.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "meshrel/random.hpp"

namespace meshrel {

void GeoParams::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::validation, what); };
    if (n < 1) fail(fmt::format("node count must be positive, got {}", n));
    if (!(area > 0.0)) fail("area must be positive");
    if (!(min_spacing > 0.0)) fail("minimum spacing must be positive");
    if (!(r1 >= 0.0) || r1 > r2) fail(fmt::format("need 0 <= r1 <= r2, got r1={} r2={}", r1, r2));
    if (!(p_lo >= 0.0) || p_lo > p_hi || p_hi > 1.0) {
        fail(fmt::format("need 0 <= p_lo <= p_hi <= 1, got [{}, {}]", p_lo, p_hi));
    }
    if (band == BandLaw::constant && !(band_probability >= 0.0 && band_probability <= 1.0)) {
        fail("band probability must be in [0,1]");
    }
}

namespace {

std::vector<Position> place(const GeoParams& params, RandomStream& rng) {
    std::vector<Position> points;
    points.reserve(static_cast<std::size_t>(params.n));
    int rejections = 0;
    while (static_cast<int>(points.size()) < params.n) {
        const Position candidate{rng.uniform(0.0, params.area), rng.uniform(0.0, params.area)};
        bool fits = true;
        for (const auto& q : points) {
            if (std::hypot(candidate.x - q.x, candidate.y - q.y) < params.min_spacing) {
                fits = false;
                break;
            }
        }
        if (fits) {
            points.push_back(candidate);
        } else if (++rejections > kMaxPlacementRejections) {
            throw Error(ErrorCode::validation,
                        fmt::format("could not place {} nodes with spacing {} in a {}x{} area",
                                    params.n, params.min_spacing, params.area, params.area));
        }
    }
    return points;
}

double link_existence(const GeoParams& params, double d) {
    if (d < params.r1) return 1.0;
    if (d > params.r2 || params.r1 == params.r2) return 0.0;
    if (params.band == BandLaw::constant) return params.band_probability;
    return (params.r2 - d) / (params.r2 - params.r1);
}

}  // namespace

ConnectivityGraph random_geometric(const GeoParams& params) {
    params.validate();
    for (int attempt = 0; attempt < kMaxConnectivityAttempts; ++attempt) {
        RandomStream rng(params.seed, static_cast<std::uint64_t>(attempt));
        const auto points = place(params, rng);

        std::vector<UndirectedEdge> edges;
        for (int u = 0; u < params.n; ++u) {
            for (int v = u + 1; v < params.n; ++v) {
                const auto& a = points[static_cast<std::size_t>(u)];
                const auto& b = points[static_cast<std::size_t>(v)];
                const double d = std::hypot(a.x - b.x, a.y - b.y);
                const double exists = link_existence(params, d);
                // Always draw both numbers so one pair's outcome never shifts another's.
                const double coin = rng.uniform();
                const double p = rng.uniform(params.p_lo, params.p_hi);
                if (coin < exists) edges.push_back({u, v, p});
            }
        }

        std::vector<std::optional<Position>> positions(points.begin(), points.end());
        ConnectivityGraph g(params.n, std::move(edges), std::move(positions));
        if (g.connected()) return g;
    }
    throw Error(ErrorCode::validation,
                fmt::format("no connected graph after {} attempts (seed {})",
                            kMaxConnectivityAttempts, params.seed));
}

Dodag ladder(int width, int length, double p, LadderWiring wiring) {
    if (width < 1 || length < 1) {
        throw Error(ErrorCode::validation,
                    fmt::format("ladder needs width, length >= 1, got {}x{}", width, length));
    }
    const NodeId source = 0;
    const NodeId sink = width * length + 1;
    auto relay = [width](int column, int row) { return 1 + column * width + row; };

    std::vector<DirectedEdge> edges;
    for (int r = 0; r < width; ++r) edges.push_back({source, relay(0, r), p});
    for (int c = 0; c + 1 < length; ++c) {
        for (int r = 0; r < width; ++r) {
            if (wiring == LadderWiring::disjoint) {
                edges.push_back({relay(c, r), relay(c + 1, r), p});
                continue;
            }
            for (int s = 0; s < width; ++s) edges.push_back({relay(c, r), relay(c + 1, s), p});
        }
    }
    for (int r = 0; r < width; ++r) edges.push_back({relay(length - 1, r), sink, p});
    return Dodag(sink + 1, std::move(edges), sink, source);
}

}  // namespace meshrel
