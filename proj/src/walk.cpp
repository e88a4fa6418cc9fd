#include "gemsec/walk.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

namespace gemsec {

void WalkConfig::validate() const {
    if (walks_per_node < 1) throw InputError("walks per node must be at least 1");
    if (walk_length < 2) throw InputError("walk length must be at least 2");
    if (window < 1) throw InputError("window must be at least 1");
    if (window >= walk_length) throw InputError("window must be smaller than the walk length");
    if (!(return_param > 0.0) || !(inout_param > 0.0)) {
        throw InputError("return and in-out parameters must be positive");
    }
}

namespace {

NodeId uniform_neighbor(std::span<const NodeId> nbrs, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    return nbrs[pick(rng)];
}

}  // namespace

Walk first_order_walk(const Graph& g, NodeId source, std::size_t length, Rng& rng) {
    g.check_node(source);
    Walk walk;
    walk.reserve(length);
    walk.push_back(source);
    if (g.degree(source) == 0) return walk;
    while (walk.size() < length) walk.push_back(uniform_neighbor(g.neighbors(walk.back()), rng));
    return walk;
}

namespace {

// Unnormalized bias weights for the neighbors of `current`, in adjacency order.
void bias_weights(const Graph& g, NodeId prev, NodeId current, double p, double q,
                  std::vector<double>& out) {
    const auto nbrs = g.neighbors(current);
    const auto prev_nbrs = g.neighbors(prev);
    out.resize(nbrs.size());
    // both lists are sorted, so membership in N(prev) is a merge scan
    auto it = prev_nbrs.begin();
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const NodeId x = nbrs[i];
        while (it != prev_nbrs.end() && *it < x) ++it;
        if (x == prev) {
            out[i] = 1.0 / p;
        } else if (it != prev_nbrs.end() && *it == x) {
            out[i] = 1.0;
        } else {
            out[i] = 1.0 / q;
        }
    }
}

}  // namespace

std::vector<double> second_order_transition(const Graph& g, NodeId prev, NodeId current, double p,
                                            double q) {
    std::vector<double> w;
    bias_weights(g, prev, current, p, q, w);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    return w;
}

Walk second_order_walk(const Graph& g, NodeId source, std::size_t length, double p, double q, Rng& rng) {
    g.check_node(source);
    if (!(p > 0.0) || !(q > 0.0)) throw InputError("return and in-out parameters must be positive");
    Walk walk;
    walk.reserve(length);
    walk.push_back(source);
    if (g.degree(source) == 0 || length < 2) return walk;
    walk.push_back(uniform_neighbor(g.neighbors(source), rng));

    std::vector<double> cumulative;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    while (walk.size() < length) {
        const NodeId cur = walk.back();
        bias_weights(g, walk[walk.size() - 2], cur, p, q, cumulative);
        std::partial_sum(cumulative.begin(), cumulative.end(), cumulative.begin());
        const double r = uniform(rng) * cumulative.back();
        auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        if (pos == cumulative.end()) --pos;
        walk.push_back(g.neighbors(cur)[static_cast<std::size_t>(pos - cumulative.begin())]);
    }
    return walk;
}

Walk sample_walk(const Graph& g, const WalkConfig& cfg, std::size_t epoch, NodeId source) {
    Rng rng = make_rng(cfg.seed, Stream::walk, epoch, source);
    if (cfg.order == WalkOrder::second) {
        return second_order_walk(g, source, cfg.walk_length, cfg.return_param, cfg.inout_param, rng);
    }
    return first_order_walk(g, source, cfg.walk_length, rng);
}

WalkContextBatch extract_features(const Walk& walk, std::size_t window) {
    WalkContextBatch batch;
    const std::size_t n = walk.size();
    batch.pairs.reserve(pair_count(n, window));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= window ? i - window : 0;
        const std::size_t hi = std::min(n - 1, i + window);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j != i) batch.pairs.emplace_back(walk[i], walk[j]);
        }
    }
    if (n >= 2) {
        batch.traversed_edges.reserve(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) batch.traversed_edges.emplace_back(walk[i], walk[i + 1]);
    }
    return batch;
}

std::size_t pair_count(std::size_t walk_length, std::size_t window) noexcept {
    std::size_t total = 0;
    for (std::size_t i = 0; i < walk_length; ++i) {
        const std::size_t left = std::min(i, window);
        const std::size_t right = std::min(walk_length - 1 - i, window);
        total += left + right;
    }
    return total;
}

std::vector<NodeId> epoch_order(std::size_t node_count, std::size_t epoch, std::uint64_t seed) {
    if (node_count < 1) throw InputError("epoch_order: node_count must be at least 1");
    std::vector<NodeId> order(node_count);
    std::iota(order.begin(), order.end(), NodeId{0});
    Rng rng = make_rng(seed, Stream::shuffle, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

void write_walk(std::ostream& out, const Walk& walk) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
        if (i) out << ' ';
        out << walk[i];
    }
    out << '\n';
}

}  // namespace gemsec
