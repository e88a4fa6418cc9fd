#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "gemsec/common.hpp"

namespace gemsec {

// Immutable simple undirected graph in compressed row layout. Neighbor lists
// are sorted ascending; every edge appears in both endpoint lists.
class Graph {
public:
    Graph() = default;

    // Builds from an undirected edge list over dense ids [0, node_count).
    // Self-loops are dropped and duplicates merged.
    static Graph from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId v) const noexcept {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(NodeId u, NodeId v) const noexcept;

    // Position of v within the concatenated adjacency array for row u, or
    // npos when (u, v) is not an edge.
    std::size_t edge_slot(NodeId u, NodeId v) const noexcept;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::span<const NodeId> targets() const noexcept { return targets_; }

    void check_node(NodeId v) const;  // throws InputError

    bool operator==(const Graph&) const = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> targets_;
};

enum class EdgeListFormat { csv, tsv, whitespace, automatic };

EdgeListFormat parse_edge_list_format(std::string_view name);

struct LoadedGraph {
    Graph graph;
    // original_ids[dense] = label used in the input file
    std::vector<std::int64_t> original_ids;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_merged = 0;
    bool header_skipped = false;
};

// Reads two integer tokens per line. '#' starts a comment line. A first data
// line made only of non-numeric tokens is treated as a header. Ids are
// compacted to 0..n-1 in order of first appearance.
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           EdgeListFormat format = EdgeListFormat::automatic);
LoadedGraph parse_edge_list(std::string_view text, EdgeListFormat format = EdgeListFormat::automatic);

// |N(u) ∩ N(v)| / |N(u) ∪ N(v)| over open neighborhoods; 0 when the union is
// empty.
double jaccard_overlap(const Graph& g, NodeId u, NodeId v);

// Jaccard weight per adjacency slot, symmetric by construction.
class EdgeWeightTable {
public:
    EdgeWeightTable() = default;
    EdgeWeightTable(const Graph& g, std::vector<double> slot_weights)
        : graph_(&g), weights_(std::move(slot_weights)) {}

    // Throws InputError when (u, v) is not an edge.
    double weight(NodeId u, NodeId v) const;
    std::span<const double> slot_weights() const noexcept { return weights_; }
    bool empty() const noexcept { return graph_ == nullptr; }

private:
    const Graph* graph_ = nullptr;
    std::vector<double> weights_;
};

// The returned table references g, which must outlive it.
EdgeWeightTable compute_edge_weights(const Graph& g);

// G(n, p) with p = avg_degree / (n - 1), generated by geometric skipping so the
// cost is linear in n + |E|.
Graph erdos_renyi(std::size_t n, double avg_degree, std::uint64_t seed);

}  // namespace gemsec
