#include "gemsec/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "gemsec/kernels.hpp"
#include "gemsec/rng.hpp"

namespace gemsec {

std::vector<std::size_t> ClusterAssignment::sizes() const {
    std::vector<std::size_t> out(cluster_count, 0);
    for (ClusterId c : labels) ++out[c];
    return out;
}

ClusterAssignment assign_to_centers(const Matrix& points, const Matrix& centers) {
    if (points.cols() != centers.cols()) throw InputError("points and centers differ in dimension");
    ClusterAssignment a;
    a.cluster_count = centers.rows();
    a.labels.resize(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) a.labels[i] = nearest_center(centers, points.row(i)).cluster;
    return a;
}

ClusterAssignment assign_clusters(const EmbeddingState& state) {
    return assign_to_centers(state.embeddings, state.centers);
}

double modularity(const Graph& g, const ClusterAssignment& a) {
    if (a.labels.size() != g.node_count()) {
        throw InputError("assignment covers " + std::to_string(a.labels.size()) + " nodes, graph has " +
                         std::to_string(g.node_count()));
    }
    const double two_m = static_cast<double>(g.targets().size());
    if (two_m == 0.0) return 0.0;
    std::vector<double> internal(a.cluster_count, 0.0);  // ordered pairs inside c (2 × edges)
    std::vector<double> degree_sum(a.cluster_count, 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const ClusterId cu = a.labels[u];
        if (cu >= a.cluster_count) throw InputError("cluster id out of range");
        degree_sum[cu] += static_cast<double>(g.degree(u));
        for (NodeId v : g.neighbors(u))
            if (a.labels[v] == cu) internal[cu] += 1.0;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < a.cluster_count; ++c) {
        const double share = degree_sum[c] / two_m;
        q += internal[c] / two_m - share * share;
    }
    return q;
}

double within_cluster_sum_of_squares(const Matrix& points, const Matrix& centers, const ClusterAssignment& a) {
    const auto& kern = kernels::active();
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        total += kern.squared_distance(points.row(i).data(), centers.row(a.labels[i]).data(), points.cols());
    }
    return total;
}

namespace {

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
    const auto& kern = kernels::active();
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    Matrix centers(k, d);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::size_t pick = first(rng);
    std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(0).begin());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = kern.squared_distance(points.row(i).data(), centers.row(0).data(), d);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double x : d2) total += x;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            const double r = u(rng);
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            // guard against the tail landing on a zero-distance point
            while (d2[pick] == 0.0 && pick > 0) --pick;
        } else {
            pick = first(rng);
        }
        std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], kern.squared_distance(points.row(i).data(), centers.row(c).data(), d));
        }
    }
    return centers;
}

KMeansResult lloyd(const Matrix& points, Matrix centers, std::size_t max_iter) {
    const auto& kern = kernels::active();
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    const std::size_t k = centers.rows();
    KMeansResult r;
    r.assignment.cluster_count = k;
    r.assignment.labels.assign(n, 0);
    std::vector<double> dist(n);
    std::vector<std::size_t> counts(k);
    bool first = true;

    for (std::size_t it = 0; it < max_iter; ++it) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ClusterId best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dd = kern.squared_distance(points.row(i).data(), centers.row(c).data(), d);
                if (dd < best_d) {
                    best_d = dd;
                    best = static_cast<ClusterId>(c);
                }
            }
            if (best != r.assignment.labels[i]) changed = true;
            r.assignment.labels[i] = best;
            dist[i] = best_d;
            wcss += best_d;
        }
        r.wcss_history.push_back(wcss);
        r.iterations = it + 1;
        if ((!changed && !first) || it + 1 == max_iter) break;  // labels always match the returned centers
        first = false;

        // update step
        Matrix sums(k, d);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const ClusterId c = r.assignment.labels[i];
            kern.axpy(1.0, points.row(i).data(), sums.row(c).data(), d);
            ++counts[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed to the farthest remaining point
                const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
                std::copy(points.row(far).begin(), points.row(far).end(), centers.row(c).begin());
                dist[far] = 0.0;
                continue;
            }
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < d; ++j) centers(c, j) = sums(c, j) * inv;
        }
    }
    r.centers = std::move(centers);
    r.wcss = within_cluster_sum_of_squares(points, r.centers, r.assignment);
    return r;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, const KMeansOptions& options) {
    if (k < 1) throw InputError("k-means needs at least one cluster");
    if (points.rows() < k) {
        throw InputError("k-means needs at least k points (n=" + std::to_string(points.rows()) +
                         ", k=" + std::to_string(k) + ")");
    }
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    KMeansResult best;
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng = make_rng(options.seed, Stream::kmeans, r);
        KMeansResult run = lloyd(points, seed_plus_plus(points, k, rng), std::max<std::size_t>(1, options.max_iter));
        if (r == 0 || run.wcss < best.wcss) best = std::move(run);
    }
    return best;
}

}  // namespace gemsec
