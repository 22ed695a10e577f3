#include "meshrel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "meshrel/graph_file.hpp"
#include "meshrel/urf.hpp"

namespace meshrel {

namespace {

constexpr int kReportDigits = 12;
constexpr Algorithm kAlgorithms[] = {Algorithm::minhop, Algorithm::urf_dt, Algorithm::urf_gg};

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double sum = 0.0;
    for (double x : v) sum += (x - m) * (x - m);
    return sum / static_cast<double>(v.size());
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
        const auto pos = line.find(sep, begin);
        parts.push_back(line.substr(begin, pos - begin));
        if (pos == std::string_view::npos) break;
        begin = pos + 1;
    }
    return parts;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
    const std::string s(text);
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_same_v<T, double>) {
            value = std::stod(s, &used);
        } else if constexpr (std::is_same_v<T, int>) {
            value = std::stoi(s, &used);
        } else {
            value = static_cast<T>(std::stoull(s, &used));
        }
        if (used == s.size()) return value;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::validation, fmt::format("rows csv line {}: bad field '{}'", line, s));
}

std::string optional_real(const std::optional<double>& v) {
    return v ? format_real(*v, kReportDigits) : std::string();
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

}  // namespace

std::string_view algorithm_name(Algorithm algo) noexcept {
    switch (algo) {
        case Algorithm::minhop: return "minhop";
        case Algorithm::urf_dt: return "urf-dt";
        case Algorithm::urf_gg: return "urf-gg";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    for (auto a : kAlgorithms) {
        if (algorithm_name(a) == name) return a;
    }
    throw Error(ErrorCode::validation, fmt::format("unknown algorithm '{}'", name));
}

std::string_view sink_rule_name(SinkRule rule) noexcept {
    switch (rule) {
        case SinkRule::node0: return "node0";
        case SinkRule::corner: return "corner";
        case SinkRule::center: return "center";
    }
    return "unknown";
}

SinkRule parse_sink_rule(std::string_view name) {
    for (auto r : {SinkRule::node0, SinkRule::corner, SinkRule::center}) {
        if (sink_rule_name(r) == name) return r;
    }
    throw Error(ErrorCode::validation, fmt::format("unknown sink rule '{}'", name));
}

// Nearest node to the origin corner or to the middle of the area; smallest id
// on ties.
NodeId choose_sink(const ConnectivityGraph& cg, SinkRule rule, double area) {
    if (rule == SinkRule::node0) return 0;
    const double target = rule == SinkRule::corner ? 0.0 : area / 2;
    NodeId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < cg.node_count(); ++v) {
        const auto& pos = cg.position(v);
        if (!pos) throw Error(ErrorCode::validation, "sink rule needs node positions");
        const double d = std::hypot(pos->x - target, pos->y - target);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

BuildResult build_topology(const ConnectivityGraph& cg, NodeId sink, Algorithm algo,
                           const ExperimentConfig& cfg) {
    switch (algo) {
        case Algorithm::minhop: return build_minhop(cg, sink);
        case Algorithm::urf_gg: return build_urf_gg(cg, sink, cfg.mode);
        case Algorithm::urf_dt:
            return build_urf_dt(cg, sink, make_schedule(cfg.tau, cfg.rounds),
                                DelayedThresholdOptions{cfg.mode, cfg.cross_links_each_round});
    }
    throw Error(ErrorCode::validation, "unknown algorithm");
}

std::vector<ReportRow> report_rows(const BuildResult& build, std::uint64_t seed, Algorithm algo,
                                   const ExperimentConfig& cfg) {
    const Dodag& g = build.topology;
    const auto rrurf = rrurf_sink(g, g.sink());
    const auto max_hop = longest_hops_to_sink(g);

    std::vector<ReportRow> rows;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (v == g.sink()) continue;
        const auto vi = static_cast<std::size_t>(v);
        ReportRow row{seed, algo, v, build.urf[vi], rrurf.values[vi], std::nullopt, build.hop[vi], max_hop[vi]};
        if (cfg.with_fpp && build.hop[vi]) {
            try {
                row.fpp = fpp_fast(g, v, FppOptions{cfg.cut_cap, {}}).values[static_cast<std::size_t>(g.sink())];
            } catch (const CapExceeded&) {
                row.fpp.reset();
            }
        }
        rows.push_back(row);
    }
    return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw Error(ErrorCode::validation, "run count must be positive");
    make_schedule(cfg.tau, cfg.rounds);  // validate before spawning work
    cfg.geo.validate();

    const auto runs = static_cast<std::size_t>(cfg.runs);
    std::vector<std::vector<ReportRow>> per_run(runs);
    std::vector<std::exception_ptr> failures(runs);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                GeoParams geo = cfg.geo;
                geo.seed = cfg.seed + r;
                const auto cg = random_geometric(geo);
                const NodeId sink = choose_sink(cg, cfg.sink, geo.area);
                for (auto algo : kAlgorithms) {
                    auto rows = report_rows(build_topology(cg, sink, algo, cfg), geo.seed, algo, cfg);
                    per_run[r].insert(per_run[r].end(), rows.begin(), rows.end());
                }
            } catch (...) {
                failures[r] = std::current_exception();
            }
        }
    };

    unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    ExperimentResult result;
    for (auto& rows : per_run) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    result.aggregate = aggregate_rows(result.rows);
    return result;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ReportRow>& rows) {
    struct RunValues {
        std::vector<double> urf;
        std::vector<double> max_hop;
        int unjoined = 0;
    };
    std::map<Algorithm, std::map<std::uint64_t, RunValues>> groups;
    for (const auto& row : rows) {
        auto& run = groups[row.algorithm][row.seed];
        run.urf.push_back(row.urf);
        if (!row.hop) ++run.unjoined;
        if (row.max_hop) run.max_hop.push_back(static_cast<double>(*row.max_hop));
    }

    std::vector<AggregateRow> out;
    for (auto algo : kAlgorithms) {
        const auto it = groups.find(algo);
        if (it == groups.end()) continue;
        AggregateRow agg;
        agg.algorithm = algo;
        for (const auto& [seed, run] : it->second) {
            ++agg.runs;
            agg.urf_mean += mean_of(run.urf);
            agg.urf_median += median_of(run.urf);
            agg.urf_variance += variance_of(run.urf);
            agg.max_hop_mean += mean_of(run.max_hop);
            agg.max_hop_median += median_of(run.max_hop);
            agg.unjoined += run.unjoined;
        }
        const double n = static_cast<double>(agg.runs);
        agg.urf_mean /= n;
        agg.urf_median /= n;
        agg.urf_variance /= n;
        agg.max_hop_mean /= n;
        agg.max_hop_median /= n;
        out.push_back(agg);
    }
    return out;
}

std::string rows_csv(const std::vector<ReportRow>& rows) {
    std::string out = "seed,algorithm,node,urf,rrurf,fpp,hop,max_hop\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", r.seed, algorithm_name(r.algorithm), r.node,
                           format_real(r.urf, kReportDigits), format_real(r.rrurf, kReportDigits),
                           optional_real(r.fpp), optional_int(r.hop), optional_int(r.max_hop));
    }
    return out;
}

std::vector<ReportRow> parse_rows_csv(std::string_view text) {
    std::vector<ReportRow> rows;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin < text.size()) {
        auto end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(begin, end - begin);
        begin = end + 1;
        if (line_no++ == 0 || line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) {
            throw Error(ErrorCode::validation, fmt::format("rows csv line {}: expected 8 fields", line_no));
        }
        ReportRow r;
        r.seed = parse_field<std::uint64_t>(f[0], line_no);
        r.algorithm = parse_algorithm(f[1]);
        r.node = parse_field<int>(f[2], line_no);
        r.urf = parse_field<double>(f[3], line_no);
        r.rrurf = parse_field<double>(f[4], line_no);
        if (!f[5].empty()) r.fpp = parse_field<double>(f[5], line_no);
        if (!f[6].empty()) r.hop = parse_field<int>(f[6], line_no);
        if (!f[7].empty()) r.max_hop = parse_field<int>(f[7], line_no);
        rows.push_back(r);
    }
    return rows;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "algorithm,runs,urf_mean,urf_median,urf_variance,max_hop_mean,max_hop_median,unjoined\n";
    for (const auto& a : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", algorithm_name(a.algorithm), a.runs,
                           format_real(a.urf_mean, kReportDigits), format_real(a.urf_median, kReportDigits),
                           format_real(a.urf_variance, kReportDigits),
                           format_real(a.max_hop_mean, kReportDigits),
                           format_real(a.max_hop_median, kReportDigits), a.unjoined);
    }
    return out;
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result) {
    const auto rows_text = rows_csv(result.rows);
    const auto recomputed = aggregate_rows(parse_rows_csv(rows_text));
    bool same = recomputed.size() == result.aggregate.size();
    for (std::size_t i = 0; same && i < recomputed.size(); ++i) {
        const auto& a = recomputed[i];
        const auto& b = result.aggregate[i];
        same = a.algorithm == b.algorithm && a.runs == b.runs && a.unjoined == b.unjoined &&
               close(a.urf_mean, b.urf_mean) && close(a.urf_median, b.urf_median) &&
               close(a.urf_variance, b.urf_variance) && close(a.max_hop_mean, b.max_hop_mean) &&
               close(a.max_hop_median, b.max_hop_median);
    }
    if (!same) {
        throw Error(ErrorCode::validation, "aggregate does not match recomputation from the row report");
    }

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, fmt::format("cannot create directory {}", dir.string()));
    write_file_atomic(dir / "rows.csv", rows_text);
    write_file_atomic(dir / "aggregate.csv", aggregate_csv(result.aggregate));
}

unsigned threads_from_environment() {
    const char* value = std::getenv("MESHREL_THREADS");
    if (value == nullptr || *value == '\0') return 0;
    try {
        const long n = std::stol(value);
        if (n >= 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::validation, fmt::format("MESHREL_THREADS must be a non-negative integer, got '{}'", value));
}

}  // namespace meshrel
