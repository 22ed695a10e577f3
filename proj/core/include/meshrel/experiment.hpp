#pragma once

// Batch comparison of topology builders over random geometric graphs, with
// per-node row reports and per-algorithm aggregates.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshrel/builders.hpp"
#include "meshrel/fpp.hpp"
#include "meshrel/netgen.hpp"

namespace meshrel {

enum class Algorithm { minhop, urf_dt, urf_gg };

std::string_view algorithm_name(Algorithm algo) noexcept;
Algorithm parse_algorithm(std::string_view name);

// Which node of a generated graph acts as the sink.
enum class SinkRule { node0, corner, center };

std::string_view sink_rule_name(SinkRule rule) noexcept;
SinkRule parse_sink_rule(std::string_view name);
NodeId choose_sink(const ConnectivityGraph& cg, SinkRule rule, double area);

struct ExperimentConfig {
    int runs = 100;
    std::uint64_t seed = 1;  // run r uses graph seed seed + r
    GeoParams geo;
    std::vector<double> tau = parse_thresholds("1:-0.01:0");
    int rounds = 100;
    SelectMode mode = SelectMode::lex;
    SinkRule sink = SinkRule::corner;  // node nearest the (0, 0) corner
    bool cross_links_each_round = true;
    bool with_fpp = false;
    std::size_t cut_cap = kDefaultCutCap;
    unsigned threads = 0;  // 0 = hardware concurrency
};

// One node of one built topology. The sink is not reported.
struct ReportRow {
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::minhop;
    NodeId node = 0;
    double urf = 0.0;
    double rrurf = 0.0;
    std::optional<double> fpp;  // node-to-sink FPP; empty unless requested or over the cut cap
    std::optional<int> hop;      // mesh hop count; empty if the node never joined
    std::optional<int> max_hop;  // longest path to the sink in hops
};

// Mean over runs of each run's per-node statistics. Unjoined nodes count with
// URF 0 and are excluded from the hop statistics.
struct AggregateRow {
    Algorithm algorithm = Algorithm::minhop;
    int runs = 0;
    double urf_mean = 0.0;
    double urf_median = 0.0;
    double urf_variance = 0.0;  // population variance within a run
    double max_hop_mean = 0.0;
    double max_hop_median = 0.0;
    int unjoined = 0;  // total over runs
};

struct ExperimentResult {
    std::vector<ReportRow> rows;  // ordered by seed, algorithm, node
    std::vector<AggregateRow> aggregate;
};

BuildResult build_topology(const ConnectivityGraph& cg, NodeId sink, Algorithm algo,
                           const ExperimentConfig& cfg);

std::vector<ReportRow> report_rows(const BuildResult& build, std::uint64_t seed, Algorithm algo,
                                   const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate_rows(const std::vector<ReportRow>& rows);

std::string rows_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_rows_csv(std::string_view text);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

// Writes rows.csv and aggregate.csv into dir, after checking that the aggregate
// recomputed from the serialized rows matches.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result);

// Thread count from MESHREL_THREADS (unset or 0 = hardware concurrency).
unsigned threads_from_environment();

}  // namespace meshrel
