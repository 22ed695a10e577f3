#include "meshrel/fpp.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include <fmt/format.h>

namespace meshrel {

double CutDistribution::total() const { return std::accumulate(pmf.begin(), pmf.end(), 0.0); }

namespace {

void check_source(const Dodag& g, NodeId source) {
    if (!g.contains(source)) {
        throw Error(ErrorCode::validation, fmt::format("source {} is not a node", source));
    }
}

std::vector<bool> reachable_from(const Dodag& g, NodeId source) {
    std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
    std::vector<NodeId> stack{source};
    seen[static_cast<std::size_t>(source)] = true;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (auto i : g.out_edges(u)) {
            const NodeId v = g.edges()[i].to;
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

struct PlannedStep {
    NodeId target;
    NodeId added;
    std::vector<NodeId> removed;
};

// The order in which nodes enter and leave the cut depends only on the
// topology, so it is planned up front. A node becomes eligible once every one
// of its incoming links starts in the cut; the target is the cut member with
// the fewest links into the eligible set (at least one), smallest id on ties,
// and it stays the target until it leaves the cut or runs out of eligible
// successors.
std::vector<PlannedStep> plan_cuts(const Dodag& g, NodeId source, const std::vector<bool>& reach) {
    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<int> unadded_in(n, 0);
    std::vector<int> remaining_out(n, 0);
    std::vector<bool> added(n, false);
    std::vector<bool> in_cut(n, false);
    std::size_t to_add = 0;

    for (const auto& e : g.edges()) {
        if (!reach[static_cast<std::size_t>(e.from)]) continue;
        ++unadded_in[static_cast<std::size_t>(e.to)];
        ++remaining_out[static_cast<std::size_t>(e.from)];
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (reach[v] && static_cast<NodeId>(v) != source) ++to_add;
    }
    for (auto i : g.out_edges(source)) --unadded_in[static_cast<std::size_t>(g.edges()[i].to)];
    added[static_cast<std::size_t>(source)] = true;
    in_cut[static_cast<std::size_t>(source)] = true;

    std::vector<NodeId> cut{source};
    std::vector<PlannedStep> steps;
    steps.reserve(to_add);

    auto eligible = [&](NodeId j) {
        const auto idx = static_cast<std::size_t>(j);
        return !added[idx] && unadded_in[idx] == 0;
    };
    auto links_into_eligible = [&](NodeId i) {
        int count = 0;
        for (auto e : g.out_edges(i)) count += eligible(g.edges()[e].to) ? 1 : 0;
        return count;
    };

    // A source without outgoing links leaves the cut immediately.
    NodeId target = source;
    while (to_add > 0) {
        if (!in_cut[static_cast<std::size_t>(target)] || links_into_eligible(target) == 0) {
            int best = 0;
            NodeId best_id = -1;
            for (NodeId i : cut) {
                const int c = links_into_eligible(i);
                if (c > 0 && (best == 0 || c < best || (c == best && i < best_id))) {
                    best = c;
                    best_id = i;
                }
            }
            target = best_id;
            if (best == 0) {
                throw Error(ErrorCode::validation, "vertex-cut growth stalled; graph has a cycle");
            }
        }

        NodeId v = -1;
        for (auto e : g.out_edges(target)) {
            const NodeId j = g.edges()[e].to;
            if (eligible(j) && (v < 0 || j < v)) v = j;
        }

        added[static_cast<std::size_t>(v)] = true;
        in_cut[static_cast<std::size_t>(v)] = true;
        cut.push_back(v);
        --to_add;
        for (auto e : g.out_edges(v)) --unadded_in[static_cast<std::size_t>(g.edges()[e].to)];
        for (auto e : g.in_edges(v)) {
            const NodeId i = g.edges()[e].from;
            if (reach[static_cast<std::size_t>(i)]) --remaining_out[static_cast<std::size_t>(i)];
        }

        PlannedStep step{target, v, {}};
        for (NodeId i : cut) {
            if (remaining_out[static_cast<std::size_t>(i)] == 0) step.removed.push_back(i);
        }
        for (NodeId i : step.removed) in_cut[static_cast<std::size_t>(i)] = false;
        std::erase_if(cut, [&](NodeId i) { return !in_cut[static_cast<std::size_t>(i)]; });
        steps.push_back(std::move(step));
    }
    return steps;
}

// Sums out bit `pos` of every subset index.
std::vector<double> marginalize_bit(const std::vector<double>& pmf, std::size_t pos) {
    std::vector<double> out(pmf.size() / 2);
    const std::uint64_t low_mask = (std::uint64_t{1} << pos) - 1;
    for (std::uint64_t idx = 0; idx < out.size(); ++idx) {
        const std::uint64_t base = ((idx & ~low_mask) << 1) | (idx & low_mask);
        out[idx] = pmf[base] + pmf[base | (std::uint64_t{1} << pos)];
    }
    return out;
}

}  // namespace

MetricTable fpp_bruteforce(const Dodag& g, NodeId source, std::size_t edge_cap) {
    check_source(g, source);
    const auto edges = g.edges();
    if (edges.size() > edge_cap) {
        throw CapExceeded(edges.size(), edge_cap,
                          fmt::format("brute-force FPP refused: {} edges exceeds cap {}",
                                      edges.size(), edge_cap));
    }
    if (edge_cap >= 63) throw Error(ErrorCode::validation, "edge cap must be below 63");

    const auto n = static_cast<std::size_t>(g.node_count());
    MetricTable table{MetricKind::fpp, source, std::vector<double>(n, 0.0), {}};
    std::vector<char> reached(n);
    std::vector<NodeId> stack;
    const std::uint64_t states = std::uint64_t{1} << edges.size();

    for (std::uint64_t up = 0; up < states; ++up) {
        double prob = 1.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            prob *= ((up >> i) & 1U) ? edges[i].p : 1.0 - edges[i].p;
        }
        if (prob == 0.0) continue;

        std::fill(reached.begin(), reached.end(), 0);
        reached[static_cast<std::size_t>(source)] = 1;
        stack.assign(1, source);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (auto i : g.out_edges(u)) {
                const NodeId v = edges[i].to;
                if (((up >> i) & 1U) && !reached[static_cast<std::size_t>(v)]) {
                    reached[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (reached[v]) table.values[v] += prob;
        }
    }
    table.values[static_cast<std::size_t>(source)] = 1.0;
    return table;
}

std::size_t fpp_max_cut_size(const Dodag& g, NodeId source) {
    check_source(g, source);
    topological_order(g);
    const auto reach = reachable_from(g, source);
    std::size_t cut = 1;
    std::size_t largest = 1;
    for (const auto& step : plan_cuts(g, source, reach)) {
        ++cut;
        largest = std::max(largest, cut);
        cut -= step.removed.size();
    }
    return largest;
}

MetricTable fpp_fast(const Dodag& g, NodeId source, const FppOptions& options) {
    check_source(g, source);
    if (options.cut_cap < 1 || options.cut_cap > kMaxCutCap) {
        throw Error(ErrorCode::validation,
                    fmt::format("cut cap must be in 1..{}, got {}", kMaxCutCap, options.cut_cap));
    }
    topological_order(g);  // rejects cycles

    const auto n = static_cast<std::size_t>(g.node_count());
    const auto reach = reachable_from(g, source);
    const auto plan = plan_cuts(g, source, reach);

    MetricTable table{MetricKind::fpp, source, std::vector<double>(n, 0.0), {}};
    table.values[static_cast<std::size_t>(source)] = 1.0;

    CutDistribution state{{source}, {0.0, 1.0}};
    std::vector<double> none_received;  // per cut subset: P(no link into v delivers)
    std::vector<double> link_fail;      // per cut position

    for (const auto& step : plan) {
        const std::size_t k = state.cut.size();
        if (k + 1 > options.cut_cap) {
            throw CapExceeded(k + 1, options.cut_cap,
                              fmt::format("vertex cut of size {} exceeds cap {}", k + 1,
                                          options.cut_cap));
        }
        const NodeId v = step.added;

        link_fail.assign(k, 1.0);
        for (auto e : g.in_edges(v)) {
            const auto& edge = g.edges()[e];
            const auto it = std::find(state.cut.begin(), state.cut.end(), edge.from);
            if (it != state.cut.end()) {
                link_fail[static_cast<std::size_t>(it - state.cut.begin())] = 1.0 - edge.p;
            }
        }

        const std::uint64_t half = std::uint64_t{1} << k;
        none_received.resize(half);
        none_received[0] = 1.0;
        for (std::uint64_t s = 1; s < half; ++s) {
            none_received[s] =
                none_received[s & (s - 1)] * link_fail[static_cast<std::size_t>(std::countr_zero(s))];
        }

        std::vector<double> next(half * 2);
        double hit = 0.0;
        for (std::uint64_t s = 0; s < half; ++s) {
            next[s] = state.pmf[s] * none_received[s];
            next[s | half] = state.pmf[s] * (1.0 - none_received[s]);
            hit += next[s | half];
        }
        state.pmf = std::move(next);
        state.cut.push_back(v);
        table.values[static_cast<std::size_t>(v)] = hit;

        if (options.on_step) options.on_step(FppStep{step.target, v, state, step.removed});

        // Remove from the highest position down so lower positions stay valid.
        std::vector<std::size_t> positions;
        for (NodeId r : step.removed) {
            positions.push_back(static_cast<std::size_t>(
                std::find(state.cut.begin(), state.cut.end(), r) - state.cut.begin()));
        }
        std::sort(positions.rbegin(), positions.rend());
        for (auto pos : positions) {
            state.pmf = marginalize_bit(state.pmf, pos);
            state.cut.erase(state.cut.begin() + static_cast<std::ptrdiff_t>(pos));
        }
    }
    return table;
}

MetricBounds fpp_bounds(const IntervalGraph& g, NodeId source, const FppOptions& options) {
    MetricBounds bounds{fpp_fast(g.lower(), source, options), fpp_fast(g.upper(), source, options)};
    bounds.lo.kind = MetricKind::fpp_lo;
    bounds.hi.kind = MetricKind::fpp_hi;
    return bounds;
}

}  // namespace meshrel
