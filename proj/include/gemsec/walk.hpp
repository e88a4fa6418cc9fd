#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gemsec/graph.hpp"
#include "gemsec/rng.hpp"

namespace gemsec {

enum class WalkOrder { first, second };

struct WalkConfig {
    std::size_t walks_per_node = 5;  // N
    std::size_t walk_length = 80;    // l
    std::size_t window = 5;          // ω
    WalkOrder order = WalkOrder::first;
    double return_param = 1.0;  // p
    double inout_param = 1.0;   // q
    std::uint64_t seed = 42;

    void validate() const;  // throws InputError
};

using Walk = std::vector<NodeId>;

struct WalkContextBatch {
    std::vector<std::pair<NodeId, NodeId>> pairs;            // (source, context)
    std::vector<std::pair<NodeId, NodeId>> traversed_edges;  // consecutive walk steps
};

// Uniform-neighbor walk. An isolated source yields the length-1 walk.
Walk first_order_walk(const Graph& g, NodeId source, std::size_t length, Rng& rng);

// Biased walk: from (prev t, current v) candidate x has weight 1/p if x == t,
// 1 if x is adjacent to t, 1/q otherwise. The first step is uniform.
Walk second_order_walk(const Graph& g, NodeId source, std::size_t length, double p, double q, Rng& rng);

// Distribution of the next node of a second-order walk at (prev, current),
// aligned with g.neighbors(current). Exposed for testing.
std::vector<double> second_order_transition(const Graph& g, NodeId prev, NodeId current, double p,
                                            double q);

// Samples the walk for `source` in `epoch` from its own RNG stream, so the
// result does not depend on which worker produced it.
Walk sample_walk(const Graph& g, const WalkConfig& cfg, std::size_t epoch, NodeId source);

// All ordered pairs (walk[i], walk[j]) with 0 < |i - j| <= window, plus the
// consecutive steps of the walk.
WalkContextBatch extract_features(const Walk& walk, std::size_t window);

// Number of pairs extract_features emits for a walk of the given length.
std::size_t pair_count(std::size_t walk_length, std::size_t window) noexcept;

std::vector<NodeId> epoch_order(std::size_t node_count, std::size_t epoch, std::uint64_t seed);

// One walk per line, space-separated dense ids.
void write_walk(std::ostream& out, const Walk& walk);

}  // namespace gemsec
