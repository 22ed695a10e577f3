// meshrel: reliability metrics and routing topology construction for mesh
// networks.
//
//   meshrel gen        generate a connectivity graph or ladder topology
//   meshrel build      build a routing topology from a connectivity graph
//   meshrel metric     evaluate FPP / URF / RRURF / bounds on a topology
//   meshrel simulate   Monte-Carlo forwarding estimates
//   meshrel experiment batch comparison of the topology builders
//   meshrel validate   check a graph file's invariants
//
// Exit codes: 0 ok, 2 validation failure, 3 resource cap, 4 I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "meshrel/builders.hpp"
#include "meshrel/experiment.hpp"
#include "meshrel/forwarding.hpp"
#include "meshrel/fpp.hpp"
#include "meshrel/graph_file.hpp"
#include "meshrel/netgen.hpp"
#include "meshrel/urf.hpp"

namespace {

using namespace meshrel;

constexpr int kCsvDigits = 12;

void emit(const std::string& output, const std::string& content) {
    if (output.empty() || output == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file_atomic(output, content);
    }
}

std::string real(double v) { return format_real(v, kCsvDigits); }

NodeId resolve_source(const GraphFile& file, const std::optional<int>& flag) {
    if (flag) {
        if (*flag < 0 || *flag >= file.node_count()) {
            throw Error(ErrorCode::validation, fmt::format("source {} is not a node", *flag));
        }
        return *flag;
    }
    if (file.source) return *file.source;
    throw Error(ErrorCode::validation, "no source: the file has none and --source was not given");
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string topology = "geometric";
    GeoParams geo;
    std::string band = "linear";
    std::optional<std::uint64_t> seed;
    int width = 3;
    int length = 6;
    double p = 0.7;
    std::string wiring = "interleaved";
    std::string output;
};

void run_gen(const GenArgs& args) {
    if (args.topology == "ladder") {
        const auto wiring = args.wiring == "disjoint" ? LadderWiring::disjoint : LadderWiring::interleaved;
        emit(args.output, serialize_graph_file(GraphFile::from(ladder(args.width, args.length, args.p, wiring))));
        return;
    }
    if (!args.seed) throw Error(ErrorCode::validation, "gen --topology geometric requires --seed");
    GeoParams geo = args.geo;
    geo.seed = *args.seed;
    geo.band = args.band == "constant" ? BandLaw::constant : BandLaw::linear;
    emit(args.output, serialize_graph_file(GraphFile::from(random_geometric(geo), 0)));
}

struct BuildArgs {
    std::string input;
    std::string algo = "urf-dt";
    std::optional<int> sink;
    std::string thresholds = "1:-0.01:0";
    int rounds = 100;
    std::string select = "lex";
    std::string cross_links = "round";
    std::string output;
    std::string report;
};

void run_build(const BuildArgs& args) {
    const auto file = read_graph_file(args.input);
    const auto cg = file.to_connectivity();
    const NodeId sink = args.sink.value_or(file.sink);

    ExperimentConfig cfg;
    cfg.mode = args.select == "exact" ? SelectMode::exact : SelectMode::lex;
    cfg.tau = parse_thresholds(args.thresholds);
    cfg.rounds = args.rounds;

    const Algorithm algo = parse_algorithm(args.algo);
    BuildResult result = algo == Algorithm::urf_dt
                             ? build_urf_dt(cg, sink, make_schedule(cfg.tau, cfg.rounds),
                                            DelayedThresholdOptions{cfg.mode, args.cross_links != "end"})
                             : build_topology(cg, sink, algo, cfg);

    emit(args.output, serialize_graph_file(GraphFile::from(result.topology)));
    if (!args.report.empty()) {
        std::string csv = "node,hop,join_round,urf\n";
        for (NodeId v = 0; v < cg.node_count(); ++v) {
            const auto vi = static_cast<std::size_t>(v);
            csv += fmt::format("{},{},{},{}\n", v, result.hop[vi] ? std::to_string(*result.hop[vi]) : "",
                               result.join_round[vi] ? std::to_string(*result.join_round[vi]) : "",
                               real(result.urf[vi]));
        }
        emit(args.report, csv);
    }
}

struct MetricArgs {
    std::string input;
    std::string kind = "urf";
    std::optional<int> source;
    std::size_t cut_cap = kDefaultCutCap;
    bool from_source = false;
    bool verbose = false;
    std::string output;
};

void run_metric(const MetricArgs& args) {
    const auto file = read_graph_file(args.input);
    FppOptions fpp_options{args.cut_cap, {}};
    if (args.verbose) {
        fpp_options.on_step = [](const FppStep& step) {
            std::string cut;
            for (auto v : step.state.cut) cut += (cut.empty() ? "" : ";") + std::to_string(v);
            std::string removed;
            for (auto v : step.removed) removed += (removed.empty() ? "" : ";") + std::to_string(v);
            std::cerr << fmt::format("fpp-step target={} added={} cut={} pmf_size={} pmf_sum={} removed={}\n",
                                     step.target, step.added, cut, step.state.pmf.size(),
                                     format_real(step.state.total(), 17), removed);
        };
    }

    std::string csv;
    if (args.kind == "fpp") {
        if (file.interval) {
            throw Error(ErrorCode::validation, "interval file given to --kind fpp; use --kind bounds");
        }
        const auto g = file.to_dodag();
        const auto table = fpp_fast(g, resolve_source(file, args.source), fpp_options);
        csv = "node,fpp\n";
        for (NodeId v = 0; v < g.node_count(); ++v) csv += fmt::format("{},{}\n", v, real(table[v]));
    } else if (args.kind == "urf" || args.kind == "rrurf") {
        if (file.interval) {
            throw Error(ErrorCode::validation, "interval file given to a point metric; use --kind bounds");
        }
        const auto g = file.to_dodag();
        MetricTable table;
        if (args.kind == "rrurf") {
            table = rrurf_sink(g, g.sink());
        } else if (args.from_source) {
            table = urf_source(g, resolve_source(file, args.source));
        } else {
            table = urf_sink(g, g.sink());
        }
        csv = fmt::format("node,{}\n", args.kind);
        for (NodeId v = 0; v < g.node_count(); ++v) csv += fmt::format("{},{}\n", v, real(table[v]));
    } else if (args.kind == "bounds") {
        const auto g = file.to_interval();
        const auto urf = urf_bounds(g, g.sink());
        std::optional<MetricBounds> fpp;
        if (args.source || file.source) fpp = fpp_bounds(g, resolve_source(file, args.source), fpp_options);
        std::vector<bool> loose(static_cast<std::size_t>(g.node_count()), false);
        for (auto v : urf.overweight_nodes) loose[static_cast<std::size_t>(v)] = true;
        csv = "node,fpp_lo,fpp_hi,urf_lo,urf_hi,urf_hi_loose\n";
        for (NodeId v = 0; v < g.node_count(); ++v) {
            csv += fmt::format("{},{},{},{},{},{}\n", v, fpp ? real(fpp->lo[v]) : "", fpp ? real(fpp->hi[v]) : "",
                               real(urf.lo[v]), real(urf.hi[v]), loose[static_cast<std::size_t>(v)] ? 1 : 0);
        }
    } else {
        throw Error(ErrorCode::validation, fmt::format("unknown metric kind '{}'", args.kind));
    }
    emit(args.output, csv);
}

struct SimulateArgs {
    std::string input;
    std::string model = "flood";
    std::uint64_t trials = 100000;
    std::optional<std::uint64_t> seed;
    std::optional<int> source;
    std::string output;
};

void run_simulate(const SimulateArgs& args) {
    if (!args.seed) throw Error(ErrorCode::validation, "simulate requires --seed");
    const auto file = read_graph_file(args.input);
    const auto g = file.to_dodag();
    TrialConfig cfg;
    cfg.trials = args.trials;
    cfg.seed = *args.seed;
    cfg.source = resolve_source(file, args.source);
    cfg.threads = threads_from_environment();
    if (args.model == "flood") {
        cfg.model = ForwardingModel::flood;
    } else if (args.model == "urf") {
        cfg.model = ForwardingModel::urf_random_order;
    } else if (args.model == "rr") {
        cfg.model = ForwardingModel::rr_ordered;
    } else {
        throw Error(ErrorCode::validation, fmt::format("unknown model '{}'", args.model));
    }
    const auto table = simulate(g, cfg);
    std::string csv = "node,hits,trials,estimate,stderr\n";
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto& e = table[v];
        csv += fmt::format("{},{},{},{},{}\n", v, e.hits, e.trials, real(e.value()), real(e.standard_error()));
    }
    emit(args.output, csv);
}

struct ExperimentArgs {
    ExperimentConfig cfg;
    std::optional<std::uint64_t> seed;
    std::string thresholds = "1:-0.01:0";
    std::string select = "lex";
    std::string band = "linear";
    std::string sink = "corner";
    std::string cross_links = "round";
    std::string out = "results";
};

void run_experiment_command(ExperimentArgs args) {
    if (!args.seed) throw Error(ErrorCode::validation, "experiment requires --seed");
    args.cfg.seed = *args.seed;
    args.cfg.tau = parse_thresholds(args.thresholds);
    args.cfg.mode = args.select == "exact" ? SelectMode::exact : SelectMode::lex;
    args.cfg.geo.band = args.band == "constant" ? BandLaw::constant : BandLaw::linear;
    args.cfg.sink = parse_sink_rule(args.sink);
    args.cfg.cross_links_each_round = args.cross_links != "end";
    args.cfg.threads = threads_from_environment();
    const auto result = run_experiment(args.cfg);
    write_experiment(args.out, result);
    std::cout << aggregate_csv(result.aggregate);
}

int run_validate(const std::string& input) {
    const auto file = read_graph_file(input);
    if (!file.directed) {
        const auto cg = file.to_connectivity();
        if (!cg.connected()) {
            std::cout << "violation connectivity: graph is not connected\n";
            return static_cast<int>(ErrorCode::validation);
        }
        std::cout << fmt::format("ok undirected nodes={} edges={}\n", cg.node_count(), cg.edges().size());
        return 0;
    }
    const auto g = file.interval ? file.to_interval().lower() : file.to_dodag();
    const auto report = validate_dodag(g);
    for (const auto& v : report.violations) {
        std::cout << fmt::format("violation {}: {}\n", violation_kind_name(v.kind), v.message);
    }
    if (!report.ok()) return static_cast<int>(ErrorCode::validation);
    std::cout << fmt::format("ok dodag nodes={} edges={} sink={}\n", g.node_count(), g.edges().size(), g.sink());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reliability metrics and routing topology construction for wireless mesh networks"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a connectivity graph or ladder topology");
    gen_cmd->add_option("--topology", gen.topology)->check(CLI::IsMember({"geometric", "ladder"}));
    gen_cmd->add_option("--n", gen.geo.n, "Node count");
    gen_cmd->add_option("--area", gen.geo.area, "Side of the square area");
    gen_cmd->add_option("--spacing", gen.geo.min_spacing, "Minimum node spacing");
    gen_cmd->add_option("--r1", gen.geo.r1, "Always-link radius");
    gen_cmd->add_option("--r2", gen.geo.r2, "Never-link radius");
    gen_cmd->add_option("--p-lo", gen.geo.p_lo, "Lowest link probability");
    gen_cmd->add_option("--p-hi", gen.geo.p_hi, "Highest link probability");
    gen_cmd->add_option("--band", gen.band, "Link law between r1 and r2")->check(CLI::IsMember({"linear", "constant"}));
    gen_cmd->add_option("--band-p", gen.geo.band_probability, "Link probability in the band (constant law)");
    gen_cmd->add_option("--seed", gen.seed, "Random seed (required for geometric graphs)");
    gen_cmd->add_option("--width", gen.width, "Ladder width");
    gen_cmd->add_option("--length", gen.length, "Ladder length");
    gen_cmd->add_option("--p", gen.p, "Ladder link probability");
    gen_cmd->add_option("--wiring", gen.wiring)->check(CLI::IsMember({"interleaved", "disjoint"}));
    gen_cmd->add_option("-o,--output", gen.output, "Output file (default stdout)");

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Build a routing topology from a connectivity graph");
    build_cmd->add_option("-i,--input", build.input, "Connectivity graph file")->required();
    build_cmd->add_option("--algo", build.algo)->check(CLI::IsMember({"minhop", "urf-gg", "urf-dt"}));
    build_cmd->add_option("--sink", build.sink, "Sink node (default: the file's sink)");
    build_cmd->add_option("--thresholds", build.thresholds, "start:step:end or comma list");
    build_cmd->add_option("--rounds", build.rounds, "Round budget for urf-dt");
    build_cmd->add_option("--select", build.select)->check(CLI::IsMember({"exact", "lex"}));
    build_cmd->add_option("--cross-links", build.cross_links, "When urf-dt adds same-hop links")
        ->check(CLI::IsMember({"round", "end"}));
    build_cmd->add_option("-o,--output", build.output, "Topology output file (default stdout)");
    build_cmd->add_option("--report", build.report, "Per-node CSV report file");

    MetricArgs metric;
    auto* metric_cmd = app.add_subcommand("metric", "Evaluate a reliability metric on a topology");
    metric_cmd->add_option("-i,--input", metric.input, "Topology file")->required();
    metric_cmd->add_option("--kind", metric.kind)->check(CLI::IsMember({"fpp", "urf", "rrurf", "bounds"}));
    metric_cmd->add_option("--source", metric.source, "Source node (default: the file's source)");
    metric_cmd->add_option("--cut-cap", metric.cut_cap, "Largest vertex cut allowed for FPP");
    metric_cmd->add_flag("--from-source", metric.from_source, "URF visit probabilities from the source");
    metric_cmd->add_flag("-v,--verbose", metric.verbose, "Trace vertex cuts to stderr");
    metric_cmd->add_option("-o,--output", metric.output, "CSV output file (default stdout)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo forwarding estimates");
    sim_cmd->add_option("-i,--input", sim.input, "Topology file")->required();
    sim_cmd->add_option("--model", sim.model)->check(CLI::IsMember({"flood", "urf", "rr"}));
    sim_cmd->add_option("--trials", sim.trials)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->required();
    sim_cmd->add_option("--source", sim.source, "Source node (default: the file's source)");
    sim_cmd->add_option("-o,--output", sim.output, "CSV output file (default stdout)");

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Compare MinHop, URF-DT and URF-GG on random graphs");
    exp_cmd->add_option("--runs", exp.cfg.runs, "Number of random graphs");
    exp_cmd->add_option("--seed", exp.seed, "Base seed; run r uses seed + r")->required();
    exp_cmd->add_option("--out", exp.out, "Output directory");
    exp_cmd->add_option("--n", exp.cfg.geo.n, "Nodes per graph");
    exp_cmd->add_option("--thresholds", exp.thresholds, "URF-DT thresholds");
    exp_cmd->add_option("--rounds", exp.cfg.rounds, "URF-DT round budget");
    exp_cmd->add_option("--select", exp.select)->check(CLI::IsMember({"exact", "lex"}));
    exp_cmd->add_option("--band", exp.band, "Link law between r1 and r2")->check(CLI::IsMember({"linear", "constant"}));
    exp_cmd->add_option("--band-p", exp.cfg.geo.band_probability, "Link probability in the band (constant law)");
    exp_cmd->add_option("--sink", exp.sink, "Sink choice")->check(CLI::IsMember({"node0", "corner", "center"}));
    exp_cmd->add_option("--cross-links", exp.cross_links, "When urf-dt adds same-hop links")
        ->check(CLI::IsMember({"round", "end"}));
    exp_cmd->add_flag("--with-fpp", exp.cfg.with_fpp, "Also report node-to-sink FPP");

    std::string validate_input;
    auto* validate_cmd = app.add_subcommand("validate", "Check a graph file's invariants");
    validate_cmd->add_option("-i,--input", validate_input, "Graph file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << fmt::format("error code=usage exit=2: {}\n", e.what());
        return 2;
    }

    try {
        if (*gen_cmd) run_gen(gen);
        if (*build_cmd) run_build(build);
        if (*metric_cmd) run_metric(metric);
        if (*sim_cmd) run_simulate(sim);
        if (*exp_cmd) run_experiment_command(exp);
        if (*validate_cmd) return run_validate(validate_input);
    } catch (const Error& e) {
        std::cerr << fmt::format("error code={} exit={}: {}\n", error_code_name(e.code()),
                                 static_cast<int>(e.code()), e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << fmt::format("error code=internal exit=1: {}\n", e.what());
        return 1;
    }
    return 0;
}
