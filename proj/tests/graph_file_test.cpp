#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "meshrel/graph_file.hpp"
#include "meshrel/netgen.hpp"
#include "support.hpp"

using namespace meshrel;

TEST(GraphFile, RoundTripIsIdentityOnCanonicalText) {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 30; ++i) {
        const auto g = test::random_dodag(rng);
        const auto text = serialize_graph_file(GraphFile::from(g));
        EXPECT_EQ(serialize_graph_file(parse_graph_file(text)), text);
    }
    GeoParams geo;
    geo.seed = 5;
    const auto text = serialize_graph_file(GraphFile::from(random_geometric(geo), 0));
    EXPECT_EQ(serialize_graph_file(parse_graph_file(text)), text);
    const auto interval = serialize_graph_file(GraphFile::from(IntervalGraph::from_point(test::diamond())));
    EXPECT_EQ(serialize_graph_file(parse_graph_file(interval)), interval);
}

TEST(GraphFile, ProbabilitiesSurviveExactly) {
    Dodag g(2, {{0, 1, 0.1 + 0.2}}, 1);
    const auto back = parse_graph_file(serialize_graph_file(GraphFile::from(g))).to_dodag();
    EXPECT_EQ(*back.link_probability(0, 1), 0.1 + 0.2);
}

TEST(GraphFile, StringLabels) {
    const auto file = parse_graph_file(R"({"directed": true, "sink": "b", "source": "a",
        "nodes": [{"id": "a"}, {"id": "m"}, {"id": "b"}],
        "edges": [{"u": "a", "v": "m", "p": 0.5}, {"u": "m", "v": "b", "p": 0.25}]})");
    const auto g = file.to_dodag();
    EXPECT_EQ(g.sink(), 2);
    EXPECT_EQ(g.source(), 0);
    EXPECT_EQ(*g.link_probability(1, 2), 0.25);
}

TEST(GraphFile, RejectsMalformedInput) {
    EXPECT_THROW(parse_graph_file("not json"), Error);
    EXPECT_THROW(parse_graph_file(R"({"directed": true})"), Error);
    EXPECT_THROW(parse_graph_file(R"({"directed": true, "sink": 9, "nodes": [{"id": 0}], "edges": []})"), Error);
    EXPECT_THROW(parse_graph_file(R"({"directed": true, "sink": 0, "nodes": [{"id": 0}, {"id": 0}], "edges": []})"),
                 Error);
    EXPECT_THROW(parse_graph_file(R"({"directed": true, "sink": 0, "nodes": [{"id": 0}, {"id": 1}],
        "edges": [{"u": 1, "v": 0, "p": 0.5}, {"u": 0, "v": 1, "p_lo": 0.1, "p_hi": 0.2}]})"),
                 Error);
    EXPECT_THROW(parse_graph_file(R"({"directed": true, "sink": 0, "nodes": [{"id": 0}, {"id": 1}],
        "edges": [{"u": 1, "v": 0, "p": 2}]})").to_dodag(),
                 Error);
    const auto undirected = parse_graph_file(R"({"directed": false, "sink": 0, "nodes": [{"id": 0}, {"id": 1}],
        "edges": [{"u": 1, "v": 0, "p": 0.5}]})");
    EXPECT_THROW(undirected.to_dodag(), Error);
    EXPECT_NO_THROW(undirected.to_connectivity());
}

TEST(GraphFile, MissingFileIsIoError) {
    try {
        read_graph_file("/nonexistent/graph.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io);
    }
}

TEST(GraphFile, AtomicWriteLeavesNoTemporary) {
    const auto dir = std::filesystem::temp_directory_path() / "meshrel_graph_file_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "g.json";
    write_graph_file(path, GraphFile::from(test::diamond()));
    EXPECT_TRUE(std::filesystem::exists(path));
    EXPECT_FALSE(std::filesystem::exists(dir / "g.json.tmp"));
    EXPECT_EQ(read_graph_file(path).edges.size(), 4u);
    std::filesystem::remove_all(dir);
}

TEST(FormatReal, SignificantDigits) {
    EXPECT_EQ(format_real(0.5, 12), "0.5");
    EXPECT_EQ(format_real(-0.0, 12), "0");
    EXPECT_EQ(format_real(1.0 / 3.0, 4), "0.3333");
}
