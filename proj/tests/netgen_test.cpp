#include <gtest/gtest.h>

#include <cmath>

#include "meshrel/fpp.hpp"
#include "meshrel/graph_file.hpp"
#include "meshrel/netgen.hpp"
#include "meshrel/urf.hpp"

using namespace meshrel;

namespace {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST(RandomGeometric, DefaultsAreConnectedAndBanded) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GeoParams geo;
        geo.seed = seed;
        const auto cg = random_geometric(geo);
        ASSERT_EQ(cg.node_count(), 40);
        EXPECT_TRUE(cg.connected());
        for (const auto& e : cg.edges()) {
            EXPECT_GE(e.p, 0.7);
            EXPECT_LE(e.p, 1.0);
        }
        for (NodeId u = 0; u < cg.node_count(); ++u) {
            const auto pu = *cg.position(u);
            EXPECT_GE(pu.x, 0.0);
            EXPECT_LE(pu.x, 10.0);
            for (NodeId v = u + 1; v < cg.node_count(); ++v) {
                const double d = distance(pu, *cg.position(v));
                EXPECT_GE(d, 0.5);
                if (d < geo.r1) EXPECT_TRUE(cg.link_probability(u, v));
                if (d > geo.r2) EXPECT_FALSE(cg.link_probability(u, v));
            }
        }
    }
}

TEST(RandomGeometric, TwoNodes) {
    GeoParams geo;
    geo.n = 2;
    geo.r1 = geo.r2 = 20.0;
    geo.seed = 3;
    const auto cg = random_geometric(geo);
    EXPECT_GE(distance(*cg.position(0), *cg.position(1)), 0.5);
}

TEST(RandomGeometric, HardDisk) {
    GeoParams geo;
    geo.r1 = geo.r2 = 2.5;
    geo.seed = 4;
    const auto cg = random_geometric(geo);
    for (NodeId u = 0; u < cg.node_count(); ++u) {
        for (NodeId v = u + 1; v < cg.node_count(); ++v) {
            const double d = distance(*cg.position(u), *cg.position(v));
            EXPECT_EQ(d < 2.5, cg.link_probability(u, v).has_value());
        }
    }
}

TEST(RandomGeometric, Deterministic) {
    GeoParams geo;
    geo.seed = 77;
    EXPECT_EQ(serialize_graph_file(GraphFile::from(random_geometric(geo), 0)),
              serialize_graph_file(GraphFile::from(random_geometric(geo), 0)));
    GeoParams other = geo;
    other.seed = 78;
    EXPECT_NE(serialize_graph_file(GraphFile::from(random_geometric(geo), 0)),
              serialize_graph_file(GraphFile::from(random_geometric(other), 0)));
}

TEST(RandomGeometric, InvalidParameters) {
    GeoParams geo;
    geo.r1 = 4;
    EXPECT_THROW(random_geometric(geo), Error);
    geo = {};
    geo.min_spacing = 0;
    EXPECT_THROW(random_geometric(geo), Error);
    geo = {};
    geo.p_lo = 0.9;
    geo.p_hi = 0.8;
    EXPECT_THROW(random_geometric(geo), Error);
}

TEST(RandomGeometric, ImpossiblePlacementIsRejected) {
    GeoParams geo;
    geo.n = 500;
    geo.area = 2;
    EXPECT_THROW(random_geometric(geo), Error);
    // Too sparse to ever connect.
    geo = {};
    geo.n = 10;
    geo.area = 1000;
    EXPECT_THROW(random_geometric(geo), Error);
}

TEST(Ladder, SmallestLadder) {
    const auto g = ladder(1, 1, 0.6);
    EXPECT_EQ(g.node_count(), 3);
    EXPECT_NEAR(fpp_fast(g, 0)[2], 0.36, 1e-15);
    EXPECT_NEAR(urf_sink(g, 2)[0], 0.36, 1e-15);
}

TEST(Ladder, CertainLinks) {
    const auto g = ladder(2, 2, 1.0);
    const auto f = fpp_fast(g, 0);
    const auto u = urf_sink(g, g.sink());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        EXPECT_EQ(f[v], 1.0);
        EXPECT_EQ(u[v], 1.0);
    }
}

TEST(Ladder, ValidForAllShapes) {
    for (int w = 1; w <= 5; ++w) {
        for (int l = 1; l <= 6; ++l) {
            for (auto wiring : {LadderWiring::interleaved, LadderWiring::disjoint}) {
                const auto g = ladder(w, l, 0.7, wiring);
                EXPECT_EQ(g.node_count(), w * l + 2);
                EXPECT_EQ(g.sink(), w * l + 1);
                EXPECT_TRUE(validate_dodag(g).ok());
            }
        }
    }
    EXPECT_THROW(ladder(0, 3, 0.5), Error);
}

TEST(Ladder, WidthThreeFppAboveUrfAtSink) {
    const auto g = ladder(3, 6, 0.7);
    EXPECT_GT(fpp_fast(g, 0)[g.sink()], urf_source(g, 0)[g.sink()]);
}
