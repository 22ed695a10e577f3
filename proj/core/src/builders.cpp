#include "meshrel/builders.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include <fmt/format.h>

#include "meshrel/urf.hpp"

namespace meshrel {

namespace {

constexpr double kImprovement = 1e-12;

bool lex_before(const Candidate& a, const Candidate& b) {
    if (a.metric != b.metric) return a.metric > b.metric;
    if (a.p != b.p) return a.p > b.p;
    return a.id < b.id;
}

std::vector<NodeId> sorted_ids(std::span<const Candidate> links) {
    std::vector<NodeId> ids;
    ids.reserve(links.size());
    for (const auto& c : links) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t");
    return std::string(text.substr(first, last - first + 1));
}

double parse_number(std::string_view text) {
    const std::string s = trim(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::validation, fmt::format("bad number '{}' in threshold schedule", s));
    }
    return value;
}

void check_thresholds(const std::vector<double>& tau) {
    if (tau.empty()) throw Error(ErrorCode::validation, "threshold schedule is empty");
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < 0.0 || tau[i] > 1.0) {
            throw Error(ErrorCode::validation,
                        fmt::format("threshold {} = {} outside [0,1]", i + 1, tau[i]));
        }
        if (i > 0 && tau[i] > tau[i - 1]) {
            throw Error(ErrorCode::validation,
                        fmt::format("thresholds must not increase: tau[{}] = {} > tau[{}] = {}", i + 1,
                                    tau[i], i, tau[i - 1]));
        }
    }
}

std::vector<std::optional<int>> bfs_hops(const ConnectivityGraph& cg, NodeId sink) {
    std::vector<std::optional<int>> hop(static_cast<std::size_t>(cg.node_count()));
    hop[static_cast<std::size_t>(sink)] = 0;
    std::queue<NodeId> frontier;
    frontier.push(sink);
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop();
        for (const auto& n : cg.neighbors(u)) {
            auto& h = hop[static_cast<std::size_t>(n.id)];
            if (!h) {
                h = *hop[static_cast<std::size_t>(u)] + 1;
                frontier.push(n.id);
            }
        }
    }
    return hop;
}

void check_sink(const ConnectivityGraph& cg, NodeId sink) {
    if (sink < 0 || sink >= cg.node_count()) {
        throw Error(ErrorCode::validation, fmt::format("sink {} is not a node", sink));
    }
}

BuildResult finish(const ConnectivityGraph& cg, NodeId sink, std::vector<DirectedEdge> edges,
                   std::vector<std::optional<int>> hop, std::vector<std::optional<int>> join_round) {
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });
    BuildResult result{Dodag(cg.node_count(), std::move(edges), sink), std::move(hop),
                       std::move(join_round), {}};
    result.urf = urf_sink(result.topology, sink).values;
    return result;
}

}  // namespace

std::string_view select_mode_name(SelectMode mode) noexcept {
    return mode == SelectMode::exact ? "exact" : "lex";
}

double urf_via(std::span<const Candidate> links) {
    std::vector<double> p;
    p.reserve(links.size());
    for (const auto& c : links) p.push_back(c.p);
    const auto w = urf_weights_poly(p);
    double value = 0.0;
    for (std::size_t i = 0; i < links.size(); ++i) value += w[i] * links[i].metric;
    return value;
}

Selection select_downstream(std::span<const Candidate> candidates, SelectMode mode) {
    if (candidates.empty()) throw Error(ErrorCode::validation, "no downstream candidates");

    if (mode == SelectMode::exact) {
        if (candidates.size() > kExactSelectCap) {
            throw CapExceeded(candidates.size(), kExactSelectCap,
                              fmt::format("exact downstream selection refused for {} candidates "
                                          "(cap {}); use lex selection",
                                          candidates.size(), kExactSelectCap));
        }
        Selection best;
        best.metric = -1.0;
        std::vector<Candidate> subset;
        const std::uint32_t count = 1U << candidates.size();
        for (std::uint32_t mask = 1; mask < count; ++mask) {
            subset.clear();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if ((mask >> i) & 1U) subset.push_back(candidates[i]);
            }
            const double value = urf_via(subset);
            auto ids = sorted_ids(subset);
            bool better = value > best.metric + kImprovement;
            if (!better && std::abs(value - best.metric) <= kImprovement) {
                better = ids.size() < best.chosen.size() ||
                         (ids.size() == best.chosen.size() && ids < best.chosen);
            }
            if (better) best = Selection{std::move(ids), value};
        }
        return best;
    }

    std::vector<Candidate> order(candidates.begin(), candidates.end());
    std::sort(order.begin(), order.end(), lex_before);
    std::vector<Candidate> chosen;
    double value = 0.0;
    for (const auto& c : order) {
        chosen.push_back(c);
        const double trial = urf_via(chosen);
        if (trial > value + kImprovement) {
            value = trial;
        } else {
            chosen.pop_back();
        }
    }
    if (chosen.empty()) {
        chosen.push_back(order.front());
        value = urf_via(chosen);
    }
    return Selection{sorted_ids(chosen), value};
}

// ---------------------------------------------------------------------------
// Threshold schedules

double ThresholdSchedule::at(int m) const {
    if (m < 1) throw Error(ErrorCode::validation, fmt::format("threshold index {} below 1", m));
    const auto idx = std::min(static_cast<std::size_t>(m), tau.size()) - 1;
    return tau[idx];
}

std::vector<double> parse_thresholds(std::string_view text) {
    std::vector<double> tau;
    if (text.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t begin = 0;
        while (true) {
            const auto pos = text.find(':', begin);
            parts.push_back(text.substr(begin, pos - begin));
            if (pos == std::string_view::npos) break;
            begin = pos + 1;
        }
        if (parts.size() != 3) {
            throw Error(ErrorCode::validation,
                        fmt::format("threshold range '{}' must be start:step:end", text));
        }
        const double start = parse_number(parts[0]);
        const double step = parse_number(parts[1]);
        const double end = parse_number(parts[2]);
        if (step == 0.0) throw Error(ErrorCode::validation, "threshold step must be non-zero");
        const double span = (end - start) / step;
        if (span < -1e-9) {
            throw Error(ErrorCode::validation,
                        fmt::format("threshold step {} never reaches {} from {}", step, end, start));
        }
        const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            double v = start + static_cast<double>(i) * step;
            if (std::abs(v - end) < 1e-9) v = end;
            if (std::abs(v) < 1e-12) v = 0.0;
            tau.push_back(v);
        }
    } else {
        std::size_t begin = 0;
        while (true) {
            const auto pos = text.find(',', begin);
            tau.push_back(parse_number(text.substr(begin, pos - begin)));
            if (pos == std::string_view::npos) break;
            begin = pos + 1;
        }
    }
    check_thresholds(tau);
    return tau;
}

ThresholdSchedule make_schedule(std::vector<double> tau, int rounds) {
    check_thresholds(tau);
    if (rounds < 1) throw Error(ErrorCode::validation, "round budget must be positive");
    return ThresholdSchedule{std::move(tau), rounds};
}

int BuildResult::joined_count() const {
    return static_cast<int>(std::count_if(hop.begin(), hop.end(), [](const auto& h) { return h.has_value(); }));
}

// ---------------------------------------------------------------------------
// MinHop

BuildResult build_minhop(const ConnectivityGraph& cg, NodeId sink) {
    check_sink(cg, sink);
    const auto hop = bfs_hops(cg, sink);
    const auto n = static_cast<std::size_t>(cg.node_count());

    // Best link probability from each node to the level below it.
    std::vector<double> best_down(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        if (!hop[u]) continue;
        for (const auto& nb : cg.neighbors(static_cast<NodeId>(u))) {
            if (*hop[static_cast<std::size_t>(nb.id)] < *hop[u]) best_down[u] = std::max(best_down[u], nb.p);
        }
    }

    std::vector<DirectedEdge> edges;
    for (const auto& e : cg.edges()) {
        const auto& hu = hop[static_cast<std::size_t>(e.u)];
        const auto& hv = hop[static_cast<std::size_t>(e.v)];
        if (!hu || !hv) continue;
        if (*hu > *hv) {
            edges.push_back({e.u, e.v, e.p});
        } else if (*hu < *hv) {
            edges.push_back({e.v, e.u, e.p});
        } else {
            const double bu = best_down[static_cast<std::size_t>(e.u)];
            const double bv = best_down[static_cast<std::size_t>(e.v)];
            if (bu < bv) edges.push_back({e.u, e.v, e.p});
            if (bv < bu) edges.push_back({e.v, e.u, e.p});
        }
    }
    return finish(cg, sink, std::move(edges), hop, hop);
}

// ---------------------------------------------------------------------------
// URF global greedy

BuildResult build_urf_gg(const ConnectivityGraph& cg, NodeId sink, SelectMode mode) {
    check_sink(cg, sink);
    const auto n = static_cast<std::size_t>(cg.node_count());
    std::vector<std::optional<int>> hop(n);
    std::vector<std::optional<int>> join_round(n);
    std::vector<double> metric(n, 0.0);
    std::vector<std::optional<Selection>> offer(n);
    std::vector<bool> stale(n, false);
    std::vector<DirectedEdge> edges;

    auto admit_neighbors_of = [&](NodeId v) {
        for (const auto& nb : cg.neighbors(v)) {
            if (!hop[static_cast<std::size_t>(nb.id)]) stale[static_cast<std::size_t>(nb.id)] = true;
        }
    };

    hop[static_cast<std::size_t>(sink)] = 0;
    join_round[static_cast<std::size_t>(sink)] = 0;
    metric[static_cast<std::size_t>(sink)] = 1.0;
    admit_neighbors_of(sink);

    std::vector<Candidate> candidates;
    for (int step = 1;; ++step) {
        for (std::size_t u = 0; u < n; ++u) {
            if (!stale[u]) continue;
            stale[u] = false;
            candidates.clear();
            for (const auto& nb : cg.neighbors(static_cast<NodeId>(u))) {
                if (hop[static_cast<std::size_t>(nb.id)]) {
                    candidates.push_back({nb.id, metric[static_cast<std::size_t>(nb.id)], nb.p});
                }
            }
            offer[u] = select_downstream(candidates, mode);
        }

        std::optional<std::size_t> pick;
        for (std::size_t u = 0; u < n; ++u) {
            if (hop[u] || !offer[u]) continue;
            if (!pick || offer[u]->metric > offer[*pick]->metric) pick = u;
        }
        if (!pick) break;

        const std::size_t u = *pick;
        int h = 0;
        for (NodeId v : offer[u]->chosen) {
            edges.push_back({static_cast<NodeId>(u), v, *cg.link_probability(static_cast<NodeId>(u), v)});
            h = std::max(h, *hop[static_cast<std::size_t>(v)] + 1);
        }
        hop[u] = h;
        join_round[u] = step;
        metric[u] = offer[u]->metric;
        offer[u].reset();
        admit_neighbors_of(static_cast<NodeId>(u));
    }
    return finish(cg, sink, std::move(edges), std::move(hop), std::move(join_round));
}

// ---------------------------------------------------------------------------
// URF delayed thresholds

namespace {

struct DelayedThresholdState {
    const ConnectivityGraph& cg;
    std::vector<std::optional<int>> hop;
    std::vector<std::optional<int>> join_round;
    std::vector<double> low_metric;  // metric over lower-hop links only; what a node broadcasts
    std::vector<std::vector<Candidate>> links;

    explicit DelayedThresholdState(const ConnectivityGraph& g)
        : cg(g),
          hop(static_cast<std::size_t>(g.node_count())),
          join_round(static_cast<std::size_t>(g.node_count())),
          low_metric(static_cast<std::size_t>(g.node_count()), 0.0),
          links(static_cast<std::size_t>(g.node_count())) {}

    // Links to same-hop neighbors with a strictly larger broadcast metric,
    // processed from the weakest node up. The strict order within a hop level
    // keeps the topology acyclic.
    void add_cross_links() {
        std::vector<NodeId> nodes;
        for (NodeId u = 0; u < cg.node_count(); ++u) {
            if (hop[static_cast<std::size_t>(u)].value_or(0) > 0) nodes.push_back(u);
        }
        std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
            const double ma = low_metric[static_cast<std::size_t>(a)];
            const double mb = low_metric[static_cast<std::size_t>(b)];
            return ma != mb ? ma < mb : a < b;
        });

        std::vector<Candidate> extra;
        for (NodeId u : nodes) {
            const auto ui = static_cast<std::size_t>(u);
            auto& own = links[ui];
            extra.clear();
            for (const auto& nb : cg.neighbors(u)) {
                const auto vi = static_cast<std::size_t>(nb.id);
                if (hop[vi] != hop[ui] || low_metric[vi] <= low_metric[ui]) continue;
                const bool linked = std::any_of(own.begin(), own.end(),
                                                [&](const Candidate& c) { return c.id == nb.id; });
                if (!linked) extra.push_back({nb.id, low_metric[vi], nb.p});
            }
            if (extra.empty()) continue;
            std::sort(extra.begin(), extra.end(), lex_before);
            double value = urf_via(own);
            for (const auto& c : extra) {
                own.push_back(c);
                const double trial = urf_via(own);
                if (trial > value + kImprovement) {
                    value = trial;
                } else {
                    own.pop_back();
                }
            }
        }
    }
};

}  // namespace

BuildResult build_urf_dt(const ConnectivityGraph& cg, NodeId sink, const ThresholdSchedule& schedule,
                         const DelayedThresholdOptions& options) {
    check_sink(cg, sink);
    check_thresholds(schedule.tau);
    if (schedule.rounds < 1) throw Error(ErrorCode::validation, "round budget must be positive");

    const auto n = static_cast<std::size_t>(cg.node_count());
    DelayedThresholdState state(cg);
    state.hop[static_cast<std::size_t>(sink)] = 0;
    state.join_round[static_cast<std::size_t>(sink)] = 0;
    state.low_metric[static_cast<std::size_t>(sink)] = 1.0;

    struct Join {
        NodeId node;
        int hop;
        Selection selection;
    };
    std::vector<Join> joins;
    std::vector<Candidate> visible;
    std::vector<Candidate> below;
    std::vector<int> visible_hop;

    for (int k = 1; k <= schedule.rounds; ++k) {
        joins.clear();
        for (NodeId u = 0; u < cg.node_count(); ++u) {
            if (state.hop[static_cast<std::size_t>(u)]) continue;
            visible.clear();
            visible_hop.clear();
            for (const auto& nb : cg.neighbors(u)) {
                const auto vi = static_cast<std::size_t>(nb.id);
                if (state.hop[vi] && *state.join_round[vi] < k) {
                    visible.push_back({nb.id, state.low_metric[vi], nb.p});
                    visible_hop.push_back(*state.hop[vi]);
                }
            }
            if (visible.empty()) continue;
            const int lowest = *std::min_element(visible_hop.begin(), visible_hop.end());
            const int highest = *std::max_element(visible_hop.begin(), visible_hop.end());

            for (int h = lowest + 1; h <= highest + 1; ++h) {
                const int m = k - h + 1;
                if (m < 1) break;  // larger h only lowers m further
                below.clear();
                for (std::size_t i = 0; i < visible.size(); ++i) {
                    if (visible_hop[i] < h) below.push_back(visible[i]);
                }
                auto selection = select_downstream(below, options.mode);
                if (selection.metric >= schedule.at(m)) {
                    joins.push_back({u, h, std::move(selection)});
                    break;
                }
            }
        }

        for (auto& j : joins) {
            const auto ui = static_cast<std::size_t>(j.node);
            state.hop[ui] = j.hop;
            state.join_round[ui] = k;
            state.low_metric[ui] = j.selection.metric;
            for (NodeId v : j.selection.chosen) {
                state.links[ui].push_back(
                    {v, state.low_metric[static_cast<std::size_t>(v)], *cg.link_probability(j.node, v)});
            }
        }
        if (options.cross_links_each_round) state.add_cross_links();

        const bool all_joined = std::all_of(state.hop.begin(), state.hop.end(),
                                            [](const auto& h) { return h.has_value(); });
        if (all_joined && options.cross_links_each_round) break;
    }
    if (!options.cross_links_each_round) state.add_cross_links();

    std::vector<DirectedEdge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (const auto& c : state.links[u]) edges.push_back({static_cast<NodeId>(u), c.id, c.p});
    }
    return finish(cg, sink, std::move(edges), std::move(state.hop), std::move(state.join_round));
}

}  // namespace meshrel
