#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace meshrel::test {

Dodag diamond(double p) {
    return Dodag(4, {{0, 1, p}, {0, 2, p}, {1, 3, p}, {2, 3, p}}, 3, 0);
}

Dodag chain(const std::vector<double>& p) {
    std::vector<DirectedEdge> edges;
    for (std::size_t i = 0; i < p.size(); ++i) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), p[i]});
    }
    const auto n = static_cast<int>(p.size()) + 1;
    return Dodag(n, std::move(edges), n - 1, 0);
}

namespace {

Dodag relabel(int n, const std::vector<DirectedEdge>& edges, NodeId sink, NodeId source,
              std::mt19937_64& rng, bool shuffle) {
    std::vector<NodeId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    if (shuffle) std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<DirectedEdge> out;
    for (const auto& e : edges) {
        out.push_back({perm[static_cast<std::size_t>(e.from)], perm[static_cast<std::size_t>(e.to)], e.p});
    }
    return Dodag(n, std::move(out), perm[static_cast<std::size_t>(sink)], perm[static_cast<std::size_t>(source)]);
}

}  // namespace

Dodag random_dodag(std::mt19937_64& rng, const RandomDagSpec& spec) {
    std::uniform_int_distribution<int> size(spec.min_nodes, spec.max_nodes);
    std::uniform_real_distribution<double> prob(spec.p_lo, spec.p_hi);
    const int n = size(rng);
    // Topological positions 0..n-1, sink last. Each non-sink gets one edge
    // forward so it can reach the sink, then extra edges up to the budget.
    std::vector<DirectedEdge> edges;
    std::vector<std::vector<bool>> has(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    for (int u = 0; u < n - 1; ++u) {
        const int v = std::uniform_int_distribution<int>(u + 1, n - 1)(rng);
        edges.push_back({u, v, prob(rng)});
        has[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
    }
    const int extra_budget = std::max(0, spec.max_edges - static_cast<int>(edges.size()));
    const int extra = extra_budget == 0 ? 0 : std::uniform_int_distribution<int>(0, extra_budget)(rng);
    for (int tries = 0, added = 0; added < extra && tries < 100; ++tries) {
        const int u = std::uniform_int_distribution<int>(0, n - 2)(rng);
        const int v = std::uniform_int_distribution<int>(u + 1, n - 1)(rng);
        if (has[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) continue;
        has[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
        edges.push_back({u, v, prob(rng)});
        ++added;
    }
    return relabel(n, edges, n - 1, 0, rng, spec.shuffle_ids);
}

Dodag random_wide_dodag(std::mt19937_64& rng, int n, int max_out) {
    std::uniform_real_distribution<double> prob(0.3, 1.0);
    std::vector<DirectedEdge> edges;
    for (int u = 0; u < n - 1; ++u) {
        const int span = std::min(n - 1 - u, 40);
        const int k = std::uniform_int_distribution<int>(1, std::min(max_out, span))(rng);
        std::vector<int> targets;
        while (static_cast<int>(targets.size()) < k) {
            const int v = u + std::uniform_int_distribution<int>(1, span)(rng);
            if (std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
        }
        for (int v : targets) edges.push_back({u, v, prob(rng)});
    }
    return relabel(n, edges, n - 1, 0, rng, true);
}

std::vector<Dodag> all_forward_dags(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> prob(0.05, 1.0);
    std::vector<std::pair<int, int>> slots;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) slots.emplace_back(u, v);
    }
    std::vector<Dodag> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
        std::vector<DirectedEdge> edges;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (mask >> i & 1U) edges.push_back({slots[i].first, slots[i].second, prob(rng)});
        }
        out.emplace_back(n, std::move(edges), n - 1, 0);
    }
    return out;
}

std::vector<double> oracle_fpp(const Dodag& g, NodeId source) {
    const auto edges = g.edges();
    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<double> result(n, 0.0);
    for (std::uint64_t state = 0; state < (std::uint64_t{1} << edges.size()); ++state) {
        double weight = 1.0;
        for (std::size_t i = 0; i < edges.size(); ++i) weight *= (state >> i & 1U) ? edges[i].p : 1.0 - edges[i].p;
        if (weight == 0.0) continue;
        std::vector<bool> seen(n, false);
        std::vector<NodeId> stack{source};
        seen[static_cast<std::size_t>(source)] = true;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (std::size_t i = 0; i < edges.size(); ++i) {
                if (edges[i].from == u && (state >> i & 1U) && !seen[static_cast<std::size_t>(edges[i].to)]) {
                    seen[static_cast<std::size_t>(edges[i].to)] = true;
                    stack.push_back(edges[i].to);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (seen[v]) result[v] += weight;
        }
    }
    return result;
}

std::vector<double> oracle_urf_weights(const std::vector<double>& p) {
    const std::size_t k = p.size();
    std::vector<double> w(k, 0.0);
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    double perms = 0.0;
    do {
        perms += 1.0;
        const auto ordered = [&] {
            std::vector<double> q;
            for (auto i : order) q.push_back(p[i]);
            return q;
        }();
        const auto ow = oracle_ordered_weights(ordered);
        for (std::size_t i = 0; i < k; ++i) w[order[i]] += ow[i];
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& x : w) x /= perms;
    return w;
}

std::vector<double> oracle_ordered_weights(const std::vector<double>& p) {
    const std::size_t k = p.size();
    std::vector<double> w(k, 0.0);
    for (std::uint64_t state = 0; state < (std::uint64_t{1} << k); ++state) {
        double weight = 1.0;
        for (std::size_t i = 0; i < k; ++i) weight *= (state >> i & 1U) ? p[i] : 1.0 - p[i];
        for (std::size_t i = 0; i < k; ++i) {
            if (state >> i & 1U) {
                w[i] += weight;
                break;
            }
        }
    }
    return w;
}

double oracle_urf_paths(const Dodag& g, NodeId a, NodeId b) {
    std::function<double(NodeId)> walk = [&](NodeId u) -> double {
        if (u == b) return 1.0;
        std::vector<double> p;
        std::vector<NodeId> to;
        for (const auto& e : g.edges()) {
            if (e.from == u) {
                p.push_back(e.p);
                to.push_back(e.to);
            }
        }
        if (p.empty()) return 0.0;
        const auto w = oracle_urf_weights(p);
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) sum += w[i] * walk(to[i]);
        return sum;
    };
    return walk(a);
}

}  // namespace meshrel::test
