#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gemsec/graph.hpp"
#include "gemsec/matrix.hpp"
#include "gemsec/model.hpp"

namespace gemsec {

// Hard node → cluster map. Cluster ids lie in [0, cluster_count); clusters
// may be empty.
struct ClusterAssignment {
    std::vector<ClusterId> labels;
    std::size_t cluster_count = 0;

    std::vector<std::size_t> sizes() const;
};

// Nearest learned center for every node.
ClusterAssignment assign_clusters(const EmbeddingState& state);
ClusterAssignment assign_to_centers(const Matrix& points, const Matrix& centers);

// Newman–Girvan modularity, O(|V| + |E|).
double modularity(const Graph& g, const ClusterAssignment& a);

struct KMeansResult {
    ClusterAssignment assignment;
    Matrix centers;
    double wcss = 0.0;
    std::vector<double> wcss_history;  // after each assignment step of the returned run
    std::size_t iterations = 0;
};

struct KMeansOptions {
    std::size_t max_iter = 300;
    std::size_t restarts = 1;  // best WCSS wins
    std::uint64_t seed = 42;
};

// Lloyd iterations from k-means++ seeding. Empty clusters are re-seeded to the
// point farthest from its assigned center.
KMeansResult kmeans(const Matrix& points, std::size_t k, const KMeansOptions& options = {});

double within_cluster_sum_of_squares(const Matrix& points, const Matrix& centers,
                                     const ClusterAssignment& a);

}  // namespace gemsec
