#include "meshrel/forwarding.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "meshrel/random.hpp"
#include "meshrel/urf.hpp"

namespace meshrel {

std::string_view forwarding_model_name(ForwardingModel model) noexcept {
    switch (model) {
        case ForwardingModel::flood: return "flood";
        case ForwardingModel::urf_random_order: return "urf";
        case ForwardingModel::rr_ordered: return "rr";
    }
    return "unknown";
}

double Estimate::value() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

double Estimate::standard_error() const noexcept {
    if (trials == 0) return 0.0;
    const double p = value();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

std::vector<bool> flood_hits(const Dodag& g, NodeId source, const std::vector<bool>& link_up) {
    std::vector<bool> hit(static_cast<std::size_t>(g.node_count()), false);
    hit[static_cast<std::size_t>(source)] = true;
    for (NodeId u : topological_order(g)) {
        if (!hit[static_cast<std::size_t>(u)]) continue;
        for (auto i : g.out_edges(u)) {
            if (link_up[i]) hit[static_cast<std::size_t>(g.edges()[i].to)] = true;
        }
    }
    return hit;
}

namespace {

struct Simulator {
    const Dodag& g;
    const TrialConfig& cfg;
    std::vector<NodeId> order;                     // topological
    std::vector<std::vector<std::size_t>> ranked;  // per node, RRURF link order

    void run(std::uint64_t first, std::uint64_t last, std::vector<std::uint64_t>& hits) const {
        const auto edges = g.edges();
        std::vector<bool> up(edges.size());
        std::vector<char> hit(static_cast<std::size_t>(g.node_count()));
        std::vector<std::size_t> links;

        for (std::uint64_t t = first; t < last; ++t) {
            RandomStream rng(cfg.seed, t);
            for (std::size_t i = 0; i < edges.size(); ++i) up[i] = rng.uniform() < edges[i].p;
            std::fill(hit.begin(), hit.end(), 0);
            hit[static_cast<std::size_t>(cfg.source)] = 1;

            if (cfg.model == ForwardingModel::flood) {
                for (NodeId u : order) {
                    if (!hit[static_cast<std::size_t>(u)]) continue;
                    for (auto i : g.out_edges(u)) {
                        if (up[i]) hit[static_cast<std::size_t>(edges[i].to)] = 1;
                    }
                }
            } else {
                NodeId at = cfg.source;
                while (true) {
                    if (cfg.model == ForwardingModel::urf_random_order) {
                        const auto out = g.out_edges(at);
                        links.assign(out.begin(), out.end());
                        for (std::size_t k = links.size(); k > 1; --k) {
                            std::swap(links[k - 1], links[rng.below(k)]);
                        }
                    } else {
                        links = ranked[static_cast<std::size_t>(at)];
                    }
                    const auto next = std::find_if(links.begin(), links.end(),
                                                   [&](std::size_t i) { return up[i]; });
                    if (next == links.end()) break;
                    at = edges[*next].to;
                    hit[static_cast<std::size_t>(at)] = 1;
                }
            }
            for (std::size_t v = 0; v < hit.size(); ++v) hits[v] += hit[v] ? 1 : 0;
        }
    }
};

}  // namespace

EstimateTable simulate(const Dodag& g, const TrialConfig& cfg) {
    if (!g.contains(cfg.source)) {
        throw Error(ErrorCode::validation, fmt::format("source {} is not a node", cfg.source));
    }
    if (cfg.trials == 0) throw Error(ErrorCode::validation, "trial count must be positive");

    Simulator sim{g, cfg, topological_order(g), {}};
    if (cfg.model == ForwardingModel::rr_ordered) {
        const auto metric = rrurf_sink(g, g.sink());
        sim.ranked.resize(static_cast<std::size_t>(g.node_count()));
        for (NodeId u = 0; u < g.node_count(); ++u) {
            sim.ranked[static_cast<std::size_t>(u)] = rrurf_link_order(g, u, metric.values);
        }
    }

    unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.trials));

    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(n, 0));
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            const std::uint64_t first = cfg.trials * w / threads;
            const std::uint64_t last = cfg.trials * (w + 1) / threads;
            workers.emplace_back([&sim, &partial, w, first, last] { sim.run(first, last, partial[w]); });
        }
    }

    EstimateTable table{cfg.model, cfg.source, std::vector<Estimate>(n)};
    for (std::size_t v = 0; v < n; ++v) {
        table.nodes[v].trials = cfg.trials;
        for (const auto& p : partial) table.nodes[v].hits += p[v];
    }
    return table;
}

}  // namespace meshrel
