#include <gtest/gtest.h>

#include <filesystem>

#include "meshrel/experiment.hpp"
#include "meshrel/graph_file.hpp"

using namespace meshrel;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.runs = 4;
    cfg.seed = 10;
    cfg.geo.n = 15;
    cfg.geo.area = 6;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST(Experiment, RowsAndAggregateShape) {
    const auto result = run_experiment(small_config());
    // 3 algorithms x 4 runs x 14 non-sink nodes.
    EXPECT_EQ(result.rows.size(), 3u * 4u * 14u);
    ASSERT_EQ(result.aggregate.size(), 3u);
    EXPECT_EQ(result.aggregate[0].algorithm, Algorithm::minhop);
    EXPECT_EQ(result.aggregate[1].algorithm, Algorithm::urf_dt);
    EXPECT_EQ(result.aggregate[2].algorithm, Algorithm::urf_gg);
    for (const auto& a : result.aggregate) {
        EXPECT_EQ(a.runs, 4);
        EXPECT_GT(a.urf_mean, 0.0);
        EXPECT_LE(a.urf_mean, 1.0);
    }
}

TEST(Experiment, ThreadCountDoesNotMatter) {
    auto cfg = small_config();
    cfg.threads = 1;
    const auto one = run_experiment(cfg);
    cfg.threads = 4;
    const auto four = run_experiment(cfg);
    EXPECT_EQ(rows_csv(one.rows), rows_csv(four.rows));
    EXPECT_EQ(aggregate_csv(one.aggregate), aggregate_csv(four.aggregate));
}

TEST(Experiment, AggregateRecomputesFromRows) {
    const auto result = run_experiment(small_config());
    const auto parsed = parse_rows_csv(rows_csv(result.rows));
    ASSERT_EQ(parsed.size(), result.rows.size());
    const auto again = aggregate_rows(parsed);
    for (std::size_t i = 0; i < again.size(); ++i) {
        EXPECT_NEAR(again[i].urf_mean, result.aggregate[i].urf_mean, 1e-9);
        EXPECT_NEAR(again[i].max_hop_median, result.aggregate[i].max_hop_median, 1e-9);
    }
}

TEST(Experiment, AggregateHandComputed) {
    std::vector<ReportRow> rows{
        {1, Algorithm::minhop, 1, 0.5, 0.5, std::nullopt, 1, 1},
        {1, Algorithm::minhop, 2, 0.7, 0.7, std::nullopt, 2, 3},
        {2, Algorithm::minhop, 1, 0.9, 0.9, std::nullopt, 1, 2},
        {2, Algorithm::minhop, 2, 0.0, 0.0, std::nullopt, std::nullopt, std::nullopt},
    };
    const auto agg = aggregate_rows(rows);
    ASSERT_EQ(agg.size(), 1u);
    EXPECT_NEAR(agg[0].urf_mean, (0.6 + 0.45) / 2, 1e-15);
    EXPECT_NEAR(agg[0].urf_median, (0.6 + 0.45) / 2, 1e-15);
    EXPECT_NEAR(agg[0].urf_variance, (0.01 + 0.2025) / 2, 1e-15);
    EXPECT_NEAR(agg[0].max_hop_mean, (2.0 + 2.0) / 2, 1e-15);
    EXPECT_EQ(agg[0].unjoined, 1);
}

TEST(Experiment, WithFppColumn) {
    auto cfg = small_config();
    cfg.runs = 1;
    cfg.with_fpp = true;
    const auto result = run_experiment(cfg);
    for (const auto& r : result.rows) {
        ASSERT_TRUE(r.fpp);
        EXPECT_GE(*r.fpp, r.urf - 1e-12);
    }
}

TEST(Experiment, WritesBothReports) {
    const auto dir = std::filesystem::temp_directory_path() / "meshrel_experiment_test";
    std::filesystem::remove_all(dir);
    write_experiment(dir, run_experiment(small_config()));
    EXPECT_TRUE(std::filesystem::exists(dir / "rows.csv"));
    const auto agg = read_text_file(dir / "aggregate.csv");
    EXPECT_EQ(agg.substr(0, agg.find('\n')),
              "algorithm,runs,urf_mean,urf_median,urf_variance,max_hop_mean,max_hop_median,unjoined");
    std::filesystem::remove_all(dir);
}

TEST(Experiment, SinkRules) {
    ConnectivityGraph cg(3, {{0, 1, 0.5}, {1, 2, 0.5}},
                         {Position{5, 5}, Position{0.5, 0.2}, Position{9, 9}});
    EXPECT_EQ(choose_sink(cg, SinkRule::node0, 10), 0);
    EXPECT_EQ(choose_sink(cg, SinkRule::corner, 10), 1);
    EXPECT_EQ(choose_sink(cg, SinkRule::center, 10), 0);
    EXPECT_EQ(parse_sink_rule("corner"), SinkRule::corner);
    EXPECT_THROW(parse_sink_rule("middle"), Error);
    EXPECT_THROW(parse_algorithm("dijkstra"), Error);
}

TEST(Experiment, ThreadsFromEnvironment) {
    setenv("MESHREL_THREADS", "3", 1);
    EXPECT_EQ(threads_from_environment(), 3u);
    setenv("MESHREL_THREADS", "lots", 1);
    EXPECT_THROW(threads_from_environment(), Error);
    unsetenv("MESHREL_THREADS");
    EXPECT_EQ(threads_from_environment(), 0u);
}
