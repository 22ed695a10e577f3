#include "meshrel/urf.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>

#include <fmt/format.h>

namespace meshrel {

namespace {

// Above this many factors the integral sum switches to compensated summation.
constexpr std::size_t kCompensatedDegree = 32;

std::vector<double> out_probabilities(const Dodag& g, NodeId u) {
    std::vector<double> p;
    for (auto i : g.out_edges(u)) p.push_back(g.edges()[i].p);
    return p;
}

void check_sink(const Dodag& g, NodeId sink) {
    if (sink != g.sink()) {
        throw Error(ErrorCode::validation,
                    fmt::format("node {} is not the sink of the topology (sink is {})", sink,
                                g.sink()));
    }
}

}  // namespace

double urf_link_weight(double p, std::span<const double> sibling_p) {
    // prod (1 - q x) over [0,1] equals prod ((1 - q) + q y) with y = 1 - x; the
    // latter has non-negative coefficients, so the expansion cannot cancel.
    std::vector<double> coeff{1.0};
    coeff.reserve(sibling_p.size() + 1);
    for (double q : sibling_p) {
        coeff.push_back(0.0);
        for (std::size_t k = coeff.size() - 1; k > 0; --k) {
            coeff[k] = coeff[k] * (1.0 - q) + coeff[k - 1] * q;
        }
        coeff[0] *= 1.0 - q;
    }

    double integral = 0.0;
    if (coeff.size() <= kCompensatedDegree) {
        for (std::size_t k = 0; k < coeff.size(); ++k) integral += coeff[k] / static_cast<double>(k + 1);
    } else {
        double carry = 0.0;
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            const double term = coeff[k] / static_cast<double>(k + 1) - carry;
            const double sum = integral + term;
            carry = (sum - integral) - term;
            integral = sum;
        }
    }
    return p * integral;
}

std::vector<double> urf_weights_poly(std::span<const double> link_p) {
    std::vector<double> weights(link_p.size());
    std::vector<double> siblings;
    for (std::size_t l = 0; l < link_p.size(); ++l) {
        siblings.clear();
        for (std::size_t e = 0; e < link_p.size(); ++e) {
            if (e != l) siblings.push_back(link_p[e]);
        }
        weights[l] = urf_link_weight(link_p[l], siblings);
    }
    return weights;
}

std::vector<double> urf_weights_subset(std::span<const double> link_p, std::size_t cap) {
    if (link_p.size() > cap) {
        throw CapExceeded(link_p.size(), cap,
                          fmt::format("subset-sum URF weights refused: out-degree {} exceeds cap "
                                      "{}; use the polynomial form",
                                      link_p.size(), cap));
    }
    const std::size_t k = link_p.size();
    std::vector<double> weights(k, 0.0);
    if (k == 0) return weights;
    std::vector<double> siblings;
    for (std::size_t l = 0; l < k; ++l) {
        siblings.clear();
        for (std::size_t e = 0; e < k; ++e) {
            if (e != l) siblings.push_back(link_p[e]);
        }
        // Each subset of up siblings; l goes first among the up links with
        // probability 1 / (|up| + 1).
        const std::uint64_t subsets = std::uint64_t{1} << siblings.size();
        double sum = 0.0;
        for (std::uint64_t up = 0; up < subsets; ++up) {
            double prob = 1.0;
            for (std::size_t i = 0; i < siblings.size(); ++i) {
                prob *= ((up >> i) & 1U) ? siblings[i] : 1.0 - siblings[i];
            }
            sum += prob / static_cast<double>(std::popcount(up) + 1);
        }
        weights[l] = link_p[l] * sum;
    }
    return weights;
}

std::vector<double> urf_weights_subset(const Dodag& g, NodeId u, std::size_t cap) {
    return urf_weights_subset(out_probabilities(g, u), cap);
}

std::vector<double> urf_weights_poly(const Dodag& g, NodeId u) {
    return urf_weights_poly(out_probabilities(g, u));
}

double WeightTable::drop_probability(const Dodag& g, NodeId u) const {
    double sum = 0.0;
    for (auto i : g.out_edges(u)) sum += weight.at(i);
    return 1.0 - sum;
}

WeightTable urf_weight_table(const Dodag& g) {
    WeightTable table{std::vector<double>(g.edges().size(), 0.0)};
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const auto out = g.out_edges(u);
        const auto w = urf_weights_poly(g, u);
        for (std::size_t i = 0; i < out.size(); ++i) table.weight[out[i]] = w[i];
    }
    return table;
}

MetricTable urf_source(const Dodag& g, NodeId source) {
    return urf_source(g, source, urf_weight_table(g));
}

MetricTable urf_source(const Dodag& g, NodeId source, const WeightTable& weights) {
    if (!g.contains(source)) {
        throw Error(ErrorCode::validation, fmt::format("source {} is not a node", source));
    }
    const auto order = topological_order(g);
    MetricTable table{MetricKind::urf, source,
                      std::vector<double>(static_cast<std::size_t>(g.node_count()), 0.0), {}};
    table.values[static_cast<std::size_t>(source)] = 1.0;
    for (NodeId u : order) {
        const double here = table.values[static_cast<std::size_t>(u)];
        if (here == 0.0) continue;
        for (auto i : g.out_edges(u)) {
            table.values[static_cast<std::size_t>(g.edges()[i].to)] += here * weights.weight[i];
        }
    }
    return table;
}

MetricTable urf_sink(const Dodag& g, NodeId sink) { return urf_sink(g, sink, urf_weight_table(g)); }

MetricTable urf_sink(const Dodag& g, NodeId sink, const WeightTable& weights) {
    check_sink(g, sink);
    const auto order = topological_order(g);
    MetricTable table{MetricKind::urf, sink,
                      std::vector<double>(static_cast<std::size_t>(g.node_count()), 0.0), {}};
    table.values[static_cast<std::size_t>(sink)] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeId u = *it;
        if (u == sink) continue;
        double value = 0.0;
        for (auto i : g.out_edges(u)) {
            value += weights.weight[i] * table.values[static_cast<std::size_t>(g.edges()[i].to)];
        }
        table.values[static_cast<std::size_t>(u)] = value;
    }
    return table;
}

std::vector<std::size_t> rrurf_link_order(const Dodag& g, NodeId u,
                                          std::span<const double> downstream_metric) {
    const auto out = g.out_edges(u);
    std::vector<std::size_t> order(out.begin(), out.end());
    const auto edges = g.edges();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = downstream_metric[static_cast<std::size_t>(edges[a].to)];
        const double mb = downstream_metric[static_cast<std::size_t>(edges[b].to)];
        if (ma != mb) return ma > mb;
        if (edges[a].p != edges[b].p) return edges[a].p > edges[b].p;
        return edges[a].to < edges[b].to;
    });
    return order;
}

std::vector<double> rrurf_weights(std::span<const double> ordered_p) {
    std::vector<double> weights(ordered_p.size());
    double all_failed = 1.0;
    for (std::size_t i = 0; i < ordered_p.size(); ++i) {
        weights[i] = all_failed * ordered_p[i];
        all_failed *= 1.0 - ordered_p[i];
    }
    return weights;
}

MetricTable rrurf_sink(const Dodag& g, NodeId sink) {
    check_sink(g, sink);
    const auto order = topological_order(g);
    MetricTable table{MetricKind::rrurf, sink,
                      std::vector<double>(static_cast<std::size_t>(g.node_count()), 0.0), {}};
    table.values[static_cast<std::size_t>(sink)] = 1.0;
    std::vector<double> ordered_p;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeId u = *it;
        if (u == sink) continue;
        const auto links = rrurf_link_order(g, u, table.values);
        ordered_p.clear();
        for (auto i : links) ordered_p.push_back(g.edges()[i].p);
        const auto w = rrurf_weights(ordered_p);
        double value = 0.0;
        for (std::size_t k = 0; k < links.size(); ++k) {
            value += w[k] * table.values[static_cast<std::size_t>(g.edges()[links[k]].to)];
        }
        table.values[static_cast<std::size_t>(u)] = value;
    }
    return table;
}

UrfBounds urf_bounds(const IntervalGraph& g, NodeId sink) {
    const Dodag& lower = g.lower();
    check_sink(lower, sink);
    const auto edges = g.edges();
    UrfBounds bounds;
    bounds.weight_lo.weight.assign(edges.size(), 0.0);
    bounds.weight_hi.weight.assign(edges.size(), 0.0);

    std::vector<double> siblings;
    for (NodeId u = 0; u < lower.node_count(); ++u) {
        const auto out = lower.out_edges(u);
        double hi_sum = 0.0;
        for (auto l : out) {
            siblings.clear();
            for (auto e : out) {
                if (e != l) siblings.push_back(edges[e].p_lo);
            }
            bounds.weight_hi.weight[l] = urf_link_weight(edges[l].p_hi, siblings);
            siblings.clear();
            for (auto e : out) {
                if (e != l) siblings.push_back(edges[e].p_hi);
            }
            bounds.weight_lo.weight[l] = urf_link_weight(edges[l].p_lo, siblings);
            hi_sum += bounds.weight_hi.weight[l];
        }
        if (hi_sum > 1.0 + 1e-12) bounds.overweight_nodes.push_back(u);
    }

    bounds.lo = urf_sink(lower, sink, bounds.weight_lo);
    bounds.hi = urf_sink(lower, sink, bounds.weight_hi);
    bounds.lo.kind = MetricKind::urf_lo;
    bounds.hi.kind = MetricKind::urf_hi;
    // Overweight nodes can push the substituted recursion past 1; 1 is still an
    // upper bound.
    for (auto& v : bounds.hi.values) v = std::min(v, 1.0);
    return bounds;
}

}  // namespace meshrel
