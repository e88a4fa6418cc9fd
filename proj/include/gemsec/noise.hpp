#pragma once

#include <span>
#include <vector>

#include "gemsec/graph.hpp"
#include "gemsec/rng.hpp"

namespace gemsec {

enum class NoiseKind { unigram, uniform };

// Sampling distribution for negative nodes. Support is the set of
// non-isolated nodes; draws are O(1) through Walker's alias method.
class NoiseDistribution {
public:
    NoiseDistribution() = default;

    // unigram: weight ∝ degree^0.75; uniform: equal weight on non-isolated nodes.
    static NoiseDistribution from_graph(const Graph& g, NoiseKind kind = NoiseKind::unigram);
    static NoiseDistribution from_weights(std::span<const double> weights);

    NodeId sample(Rng& rng) const;
    // Resamples until the draw differs from `excluded`.
    NodeId sample_excluding(NodeId excluded, Rng& rng) const;

    // Normalized probability of each node.
    std::span<const double> probabilities() const noexcept { return probability_; }
    std::size_t support_size() const noexcept { return support_; }

private:
    std::vector<double> probability_;
    std::vector<double> accept_;
    std::vector<NodeId> alias_;
    std::size_t support_ = 0;
};

}  // namespace gemsec
