#pragma once

// Joint embedding and clustering objective.
//
// For one sampled walk the minibatch loss is
//
//   mean over window pairs (v, n) of
//       -log σ(f(n)·f(v)) - Σ_{j<k} log σ(-f(u_j)·f(v))       (negative sampling)
//   + γ · Σ_{v in walk nodes} min_c ‖f(v) - μ_c‖₂              (clustering)
//   + λ · Σ_{(v,u) traversed} w(v,u) ‖f(v) - f(u)‖₂             (smoothness)
//
// where u_j are noise draws and w is the Jaccard overlap of the edge. Norm
// terms contribute a zero subgradient where their argument vanishes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gemsec/graph.hpp"
#include "gemsec/matrix.hpp"
#include "gemsec/noise.hpp"
#include "gemsec/walk.hpp"

namespace gemsec {

enum class ScheduleHorizon {
    paper,    // T = ω·l·|V|·N
    reached,  // T = |V|·N, the number of steps actually taken
};

// How the schedule's γ and the configured λ enter one walk's objective.
enum class WeightScale {
    pair,  // divided by the walk's pair count, matching the averaged NCE term
    walk,  // used as given
};

struct TrainConfig {
    std::size_t dims = 16;      // d
    std::size_t clusters = 20;  // |C|
    std::size_t negatives = 10; // k
    double gamma0 = 0.1;
    double alpha0 = 0.01;
    double alpha_final = 0.001;
    double lambda = 0.0625;
    bool clustering = true;  // false: DeepWalk, γ forced to 0
    bool smoothing = false;
    NoiseKind noise = NoiseKind::unigram;
    // Redraw noise samples equal to the pair's source. Off by default: the
    // self term -log σ(-‖f(v)‖²) is what keeps high-degree nodes near the
    // origin when one matrix serves as both input and context embedding.
    bool exclude_source_noise = false;
    ScheduleHorizon horizon = ScheduleHorizon::paper;
    WeightScale weight_scale = WeightScale::pair;
    WalkConfig walk;  // walk.seed is ignored; walks use `seed`
    std::uint64_t seed = 42;
    std::size_t workers = 1;  // walk producer threads

    void validate() const;  // throws InputError
    double effective_lambda() const noexcept { return smoothing ? lambda : 0.0; }
};

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct EmbeddingState {
    Matrix embeddings;  // |V| × d
    Matrix centers;     // |C| × d
    Matrix embedding_m;
    Matrix embedding_v;
    Matrix center_m;
    Matrix center_v;
    std::uint64_t step = 0;

    std::size_t dims() const noexcept { return embeddings.cols(); }
    bool all_finite() const noexcept;
};

// Entries of both matrices i.i.d. uniform on [-1/(2d), 1/(2d)]; moments zero.
EmbeddingState init_state(std::size_t node_count, const TrainConfig& cfg, std::uint64_t seed);

// Number of schedule steps T for the configured horizon.
std::uint64_t total_steps(const TrainConfig& cfg, std::size_t node_count);

// γ₀ · 10^(-t·log₁₀γ₀ / T), evaluated as γ₀^((T-t)/T) so both endpoints are exact.
double gamma_at(std::uint64_t t, double gamma0, std::uint64_t total);
// Same, but returns 0 in DeepWalk mode.
double gamma_at(std::uint64_t t, const TrainConfig& cfg, std::uint64_t total);

// α₀ - (α₀ - α_F)·t/T, evaluated as a convex combination.
double alpha_at(std::uint64_t t, double alpha0, double alpha_final, std::uint64_t total);
double alpha_at(std::uint64_t t, const TrainConfig& cfg, std::uint64_t total);

struct NearestCenter {
    ClusterId cluster;
    double distance;
};

// Ties go to the lowest cluster id.
NearestCenter nearest_center(const Matrix& centers, std::span<const double> point);
NearestCenter closest_center(const EmbeddingState& state, NodeId v);

struct TrainingBatch {
    WalkContextBatch context;
    std::vector<NodeId> nodes;      // distinct walk nodes in order of first visit
    std::vector<NodeId> negatives;  // negatives_per_pair draws per pair, pair-major
    std::size_t negatives_per_pair = 0;
};

std::vector<NodeId> distinct_nodes(const Walk& walk);

// k draws per pair from `noise`; with exclude_source no draw equals the
// pair's source.
std::vector<NodeId> draw_negatives(const WalkContextBatch& batch, const NoiseDistribution& noise,
                                   std::size_t k, Rng& rng, bool exclude_source = false);

TrainingBatch make_batch(const Walk& walk, std::size_t window, const NoiseDistribution& noise,
                         std::size_t k, Rng& rng, bool exclude_source = false);

struct ObjectiveWeights {
    double gamma = 0.0;
    double lambda = 0.0;
};

// Mean negative-sampling loss over the pairs with fixed noise draws.
double nce_loss(const EmbeddingState& state, const WalkContextBatch& batch,
                std::span<const NodeId> negatives, std::size_t k);

// Draws fresh negatives from `rng` and evaluates nce_loss.
double nce_minibatch_loss(const EmbeddingState& state, const WalkContextBatch& batch,
                          const NoiseDistribution& noise, std::size_t k, Rng& rng,
                          bool exclude_source = false);

double clustering_cost(const EmbeddingState& state, std::span<const NodeId> nodes);
double smoothness_cost(const EmbeddingState& state,
                       std::span<const std::pair<NodeId, NodeId>> edges,
                       const EdgeWeightTable& weights);

// Pass weights == nullptr (or lambda == 0) to drop the smoothness term.
double full_loss(const EmbeddingState& state, const TrainingBatch& batch,
                 const EdgeWeightTable* weights, ObjectiveWeights objective);

// Row-sparse gradient storage sized for one model. Rows are zero until
// touched; clear() only resets touched rows, so reuse is O(touched · d).
class GradientBuffer {
public:
    GradientBuffer() = default;
    GradientBuffer(std::size_t node_count, std::size_t clusters, std::size_t dims);

    std::span<double> node_row(NodeId v);
    std::span<double> center_row(ClusterId c);

    std::span<const double> node_gradient(NodeId v) const noexcept { return nodes_.row(v); }
    std::span<const double> center_gradient(ClusterId c) const noexcept { return centers_.row(c); }

    std::span<const NodeId> touched_nodes() const noexcept { return touched_nodes_; }
    std::span<const ClusterId> touched_centers() const noexcept { return touched_centers_; }

    const Matrix& centers() const noexcept { return centers_; }
    std::size_t dims() const noexcept { return nodes_.cols(); }
    std::size_t node_count() const noexcept { return nodes_.rows(); }
    std::size_t cluster_count() const noexcept { return centers_.rows(); }

    void clear();

private:
    Matrix nodes_;
    Matrix centers_;
    std::vector<std::uint8_t> node_mark_;
    std::vector<std::uint8_t> center_mark_;
    std::vector<NodeId> touched_nodes_;
    std::vector<ClusterId> touched_centers_;
};

// Adds the gradient of full_loss to `grads` and returns the loss.
double accumulate_gradient(const EmbeddingState& state, const TrainingBatch& batch,
                           const EdgeWeightTable* weights, ObjectiveWeights objective,
                           GradientBuffer& grads);

// Gradient of full_loss with respect to f(v).
std::vector<double> grad_node(const EmbeddingState& state, NodeId v, const TrainingBatch& batch,
                              const EdgeWeightTable* weights, ObjectiveWeights objective);

// Gradient of the clustering cost with respect to every center:
// -γ Σ_{v ∈ V_c} (f(v) - μ_c)/‖f(v) - μ_c‖. Rows of empty clusters are zero.
Matrix grad_centers(const EmbeddingState& state, std::span<const NodeId> nodes, double gamma);

// Bias-corrected Adam applied to the touched rows only; rows absent from the
// gradient keep their parameters and moments. Increments state.step.
void adam_update(EmbeddingState& state, const GradientBuffer& grads, double alpha,
                 const AdamParams& params = {});

}  // namespace gemsec
