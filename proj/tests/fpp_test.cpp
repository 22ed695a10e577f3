#include <gtest/gtest.h>

#include <random>

#include "meshrel/fpp.hpp"
#include "meshrel/netgen.hpp"
#include "support.hpp"

using namespace meshrel;

TEST(Fpp, SingleEdge) {
    Dodag g(2, {{0, 1, 0.7}}, 1, 0);
    EXPECT_NEAR(fpp_fast(g, 0)[1], 0.7, 1e-15);
    EXPECT_NEAR(fpp_bruteforce(g, 0)[1], 0.7, 1e-15);
}

TEST(Fpp, DiamondMatchesStateEnumeration) {
    const auto g = test::diamond(0.7);
    const double expected = test::oracle_fpp(g, 0)[3];
    EXPECT_NEAR(expected, 1 - (1 - 0.49) * (1 - 0.49), 1e-15);
    EXPECT_NEAR(fpp_bruteforce(g, 0)[3], expected, 1e-15);
    EXPECT_NEAR(fpp_fast(g, 0)[3], expected, 1e-15);
    EXPECT_NEAR(fpp_fast(g, 0)[3], 0.7399, 1e-12);
}

TEST(Fpp, CertainLinks) {
    Dodag g(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {4, 3, 1.0}}, 3, 0);
    const auto t = fpp_fast(g, 0);
    EXPECT_EQ(t[0], 1.0);
    EXPECT_EQ(t[3], 1.0);
    EXPECT_EQ(t[4], 0.0);  // not reachable from the source
    EXPECT_EQ(fpp_fast(test::chain({1.0, 1.0, 1.0}), 0)[3], 1.0);
}

TEST(Fpp, RandomGraphsMatchOracle) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const auto g = test::random_dodag(rng);
        const NodeId source = *g.source();
        const auto oracle = test::oracle_fpp(g, source);
        const auto fast = fpp_fast(g, source);
        const auto brute = fpp_bruteforce(g, source);
        for (NodeId v = 0; v < g.node_count(); ++v) {
            EXPECT_NEAR(fast[v], oracle[static_cast<std::size_t>(v)], 1e-12);
            EXPECT_NEAR(brute[v], oracle[static_cast<std::size_t>(v)], 1e-12);
        }
    }
}

TEST(Fpp, AllFourNodeShapes) {
    std::mt19937_64 rng(22);
    for (const auto& g : test::all_forward_dags(4, rng)) {
        const auto oracle = test::oracle_fpp(g, 0);
        const auto fast = fpp_fast(g, 0);
        for (NodeId v = 0; v < 4; ++v) EXPECT_NEAR(fast[v], oracle[static_cast<std::size_t>(v)], 1e-12);
    }
}

TEST(Fpp, PmfSumsToOneAtEveryStep) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 50; ++i) {
        const auto g = test::random_dodag(rng, {.max_nodes = 10, .max_edges = 18});
        int steps = 0;
        FppOptions options;
        options.on_step = [&](const FppStep& step) {
            ++steps;
            EXPECT_NEAR(step.state.total(), 1.0, 1e-12);
            EXPECT_EQ(step.state.pmf.size(), std::size_t{1} << step.state.cut.size());
        };
        fpp_fast(g, *g.source(), options);
        EXPECT_GT(steps, 0);
    }
}

TEST(Fpp, LadderMatchesBruteForce) {
    const auto g = ladder(2, 3, 0.7);
    const auto brute = fpp_bruteforce(g, 0);
    const auto fast = fpp_fast(g, 0);
    for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_NEAR(fast[v], brute[v], 1e-12);
}

TEST(Fpp, CapsAreEnforced) {
    const auto g = ladder(3, 6, 0.7);
    EXPECT_THROW(fpp_bruteforce(g, 0), CapExceeded);
    EXPECT_THROW(fpp_fast(g, 0, {.cut_cap = 2}), CapExceeded);
    try {
        fpp_fast(g, 0, {.cut_cap = 2});
    } catch (const CapExceeded& e) {
        EXPECT_EQ(e.code(), ErrorCode::resource_cap);
        EXPECT_EQ(e.cap(), 2u);
    }
    EXPECT_LE(fpp_max_cut_size(g, 0), 6u);
}

TEST(Fpp, MonotoneInEveryLink) {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 20; ++i) {
        const auto g = test::random_dodag(rng, {.p_lo = 0.1, .p_hi = 0.9});
        const auto base = fpp_fast(g, *g.source());
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            std::vector<double> p;
            for (const auto& x : g.edges()) p.push_back(x.p);
            p[e] = std::min(1.0, p[e] + 0.05);
            const auto up = fpp_fast(g.with_probabilities(p), *g.source());
            for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_GE(up[v], base[v] - 1e-12);
        }
    }
}

TEST(FppBounds, DiamondInterval) {
    IntervalGraph g(4, {{0, 1, 0.6, 0.8}, {0, 2, 0.6, 0.8}, {1, 3, 0.6, 0.8}, {2, 3, 0.6, 0.8}}, 3, 0);
    const auto b = fpp_bounds(g, 0);
    EXPECT_NEAR(b.lo[3], 1 - (1 - 0.36) * (1 - 0.36), 1e-12);
    EXPECT_NEAR(b.hi[3], 1 - (1 - 0.64) * (1 - 0.64), 1e-12);
}

TEST(FppBounds, DegenerateAndWidening) {
    const auto point = test::diamond(0.7);
    const auto b = fpp_bounds(IntervalGraph::from_point(point), 0);
    EXPECT_EQ(b.lo.values, b.hi.values);
    EXPECT_NEAR(b.lo[3], 0.7399, 1e-12);

    IntervalGraph wide(4, {{0, 1, 0.5, 0.9}, {0, 2, 0.7, 0.7}, {1, 3, 0.7, 0.7}, {2, 3, 0.7, 0.7}}, 3, 0);
    const auto w = fpp_bounds(wide, 0);
    for (NodeId v = 0; v < 4; ++v) {
        EXPECT_LE(w.lo[v], b.lo[v] + 1e-15);
        EXPECT_GE(w.hi[v], b.hi[v] - 1e-15);
    }
}
