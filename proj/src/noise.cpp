#include "gemsec/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gemsec {

NoiseDistribution NoiseDistribution::from_graph(const Graph& g, NoiseKind kind) {
    std::vector<double> w(g.node_count(), 0.0);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto deg = static_cast<double>(g.degree(v));
        if (deg == 0.0) continue;
        w[v] = kind == NoiseKind::unigram ? std::pow(deg, 0.75) : 1.0;
    }
    return from_weights(w);
}

NoiseDistribution NoiseDistribution::from_weights(std::span<const double> weights) {
    const std::size_t n = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (n == 0 || !(total > 0.0)) throw InputError("noise distribution has empty support");

    NoiseDistribution d;
    d.probability_.resize(n);
    d.accept_.assign(n, 0.0);
    d.alias_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] < 0.0) throw InputError("noise weights must be nonnegative");
        d.probability_[i] = weights[i] / total;
        if (weights[i] > 0.0) ++d.support_;
        d.alias_[i] = static_cast<NodeId>(i);
    }

    // Vose's alias construction
    std::vector<double> scaled(n);
    std::vector<NodeId> small;
    std::vector<NodeId> large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = d.probability_[i] * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<NodeId>(i));
    }
    while (!small.empty() && !large.empty()) {
        const NodeId s = small.back();
        small.pop_back();
        const NodeId l = large.back();
        d.accept_[s] = scaled[s];
        d.alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (NodeId l : large) d.accept_[l] = 1.0;
    // leftovers from rounding: only keep them if they carry mass
    for (NodeId s : small) {
        if (d.probability_[s] > 0.0) {
            d.accept_[s] = 1.0;
        } else {
            d.accept_[s] = 0.0;
            d.alias_[s] = static_cast<NodeId>(
                std::find_if(d.probability_.begin(), d.probability_.end(), [](double p) { return p > 0.0; }) -
                d.probability_.begin());
        }
    }
    return d;
}

NodeId NoiseDistribution::sample(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> column(0, accept_.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t i = column(rng);
    return coin(rng) < accept_[i] ? static_cast<NodeId>(i) : alias_[i];
}

NodeId NoiseDistribution::sample_excluding(NodeId excluded, Rng& rng) const {
    const bool excluded_in_support = excluded < probability_.size() && probability_[excluded] > 0.0;
    if (support_ == 0 || (support_ == 1 && excluded_in_support)) {
        throw InputError("noise distribution has no node other than the excluded one");
    }
    while (true) {
        const NodeId u = sample(rng);
        if (u != excluded) return u;
    }
}

}  // namespace gemsec
