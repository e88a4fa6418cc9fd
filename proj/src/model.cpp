#include "gemsec/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gemsec/kernels.hpp"

namespace gemsec {

void TrainConfig::validate() const {
    walk.validate();
    if (dims < 1) throw InputError("dims must be at least 1");
    if (clusters < 1) throw InputError("clusters must be at least 1");
    if (negatives < 1) throw InputError("negatives must be at least 1");
    if (!(gamma0 > 0.0 && gamma0 <= 1.0)) throw InputError("gamma0 must lie in (0, 1]");
    if (!(alpha0 > 0.0) || !(alpha_final > 0.0)) throw InputError("learning rates must be positive");
    if (alpha_final > alpha0) throw InputError("final learning rate must not exceed the initial one");
    if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
    if (workers < 1) throw InputError("workers must be at least 1");
}

bool EmbeddingState::all_finite() const noexcept {
    for (const Matrix* m : {&embeddings, &centers, &embedding_m, &embedding_v, &center_m, &center_v}) {
        for (double x : m->values())
            if (!std::isfinite(x)) return false;
    }
    return true;
}

EmbeddingState init_state(std::size_t node_count, const TrainConfig& cfg, std::uint64_t seed) {
    const std::size_t d = cfg.dims;
    EmbeddingState s;
    s.embeddings = Matrix(node_count, d);
    s.centers = Matrix(cfg.clusters, d);
    s.embedding_m = Matrix(node_count, d);
    s.embedding_v = Matrix(node_count, d);
    s.center_m = Matrix(cfg.clusters, d);
    s.center_v = Matrix(cfg.clusters, d);
    const double half_width = 1.0 / (2.0 * static_cast<double>(d));
    Rng rng = make_rng(seed, Stream::init);
    std::uniform_real_distribution<double> uniform(-half_width, half_width);
    for (double& x : s.embeddings.values()) x = uniform(rng);
    for (double& x : s.centers.values()) x = uniform(rng);
    return s;
}

std::uint64_t total_steps(const TrainConfig& cfg, std::size_t node_count) {
    const std::uint64_t steps = static_cast<std::uint64_t>(node_count) * cfg.walk.walks_per_node;
    if (cfg.horizon == ScheduleHorizon::reached) return steps;
    return steps * cfg.walk.window * cfg.walk.walk_length;
}

double gamma_at(std::uint64_t t, double gamma0, std::uint64_t total) {
    const double remaining = static_cast<double>(total - std::min(t, total)) / static_cast<double>(total);
    return std::pow(gamma0, remaining);
}

double gamma_at(std::uint64_t t, const TrainConfig& cfg, std::uint64_t total) {
    return cfg.clustering ? gamma_at(t, cfg.gamma0, total) : 0.0;
}

double alpha_at(std::uint64_t t, double alpha0, double alpha_final, std::uint64_t total) {
    const double done = static_cast<double>(std::min(t, total)) / static_cast<double>(total);
    const double remaining = static_cast<double>(total - std::min(t, total)) / static_cast<double>(total);
    return alpha0 * remaining + alpha_final * done;
}

double alpha_at(std::uint64_t t, const TrainConfig& cfg, std::uint64_t total) {
    return alpha_at(t, cfg.alpha0, cfg.alpha_final, total);
}

NearestCenter nearest_center(const Matrix& centers, std::span<const double> point) {
    const auto& k = kernels::active();
    NearestCenter best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const double d2 = k.squared_distance(point.data(), centers.row(c).data(), point.size());
        if (d2 < best.distance) best = {static_cast<ClusterId>(c), d2};
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

NearestCenter closest_center(const EmbeddingState& state, NodeId v) {
    return nearest_center(state.centers, state.embeddings.row(v));
}

std::vector<NodeId> distinct_nodes(const Walk& walk) {
    std::vector<NodeId> out;
    out.reserve(walk.size());
    for (NodeId v : walk)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

std::vector<NodeId> draw_negatives(const WalkContextBatch& batch, const NoiseDistribution& noise,
                                   std::size_t k, Rng& rng, bool exclude_source) {
    if (k < 1) throw InputError("negatives must be at least 1");
    std::vector<NodeId> out;
    out.reserve(batch.pairs.size() * k);
    for (const auto& pair : batch.pairs)
        for (std::size_t j = 0; j < k; ++j)
            out.push_back(exclude_source ? noise.sample_excluding(pair.first, rng) : noise.sample(rng));
    return out;
}

TrainingBatch make_batch(const Walk& walk, std::size_t window, const NoiseDistribution& noise,
                         std::size_t k, Rng& rng, bool exclude_source) {
    TrainingBatch b;
    b.context = extract_features(walk, window);
    b.nodes = distinct_nodes(walk);
    b.negatives = draw_negatives(b.context, noise, k, rng, exclude_source);
    b.negatives_per_pair = k;
    return b;
}

namespace {

double log_sigmoid(double x) {
    return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x)));
}

// σ(x), log σ(x) and log σ(-x) from one exp, without a branch on the sign of x
struct Sigmoid {
    double value;
    double log;
    double log_neg;
};

Sigmoid sigmoid_and_log(double x) {
    const double e = std::exp(-std::abs(x));
    const double inv = 1.0 / (1.0 + e);
    const double tail = std::log1p(e);
    return {x >= 0.0 ? inv : e * inv, std::min(x, 0.0) - tail, std::min(-x, 0.0) - tail};
}

void check_negatives(const WalkContextBatch& batch, std::span<const NodeId> negatives, std::size_t k) {
    if (k < 1) throw InputError("negatives must be at least 1");
    if (negatives.size() != batch.pairs.size() * k) {
        throw InputError("expected " + std::to_string(batch.pairs.size() * k) + " negative draws, got " +
                         std::to_string(negatives.size()));
    }
}

}  // namespace

double nce_loss(const EmbeddingState& state, const WalkContextBatch& batch,
                std::span<const NodeId> negatives, std::size_t k) {
    check_negatives(batch, negatives, k);
    if (batch.pairs.empty()) return 0.0;
    const auto& kern = kernels::active();
    const std::size_t d = state.dims();
    const Matrix& f = state.embeddings;
    double total = 0.0;
    for (std::size_t i = 0; i < batch.pairs.size(); ++i) {
        const auto [v, n] = batch.pairs[i];
        const double* fv = f.row(v).data();
        total -= log_sigmoid(kern.dot(fv, f.row(n).data(), d));
        for (std::size_t j = 0; j < k; ++j) {
            total -= log_sigmoid(-kern.dot(fv, f.row(negatives[i * k + j]).data(), d));
        }
    }
    return total / static_cast<double>(batch.pairs.size());
}

double nce_minibatch_loss(const EmbeddingState& state, const WalkContextBatch& batch,
                          const NoiseDistribution& noise, std::size_t k, Rng& rng, bool exclude_source) {
    const auto negatives = draw_negatives(batch, noise, k, rng, exclude_source);
    return nce_loss(state, batch, negatives, k);
}

double clustering_cost(const EmbeddingState& state, std::span<const NodeId> nodes) {
    double total = 0.0;
    for (NodeId v : nodes) total += closest_center(state, v).distance;
    return total;
}

double smoothness_cost(const EmbeddingState& state, std::span<const std::pair<NodeId, NodeId>> edges,
                       const EdgeWeightTable& weights) {
    const auto& kern = kernels::active();
    const std::size_t d = state.dims();
    double total = 0.0;
    for (const auto& [a, b] : edges) {
        const double w = weights.weight(a, b);
        total += w * std::sqrt(kern.squared_distance(state.embeddings.row(a).data(),
                                                     state.embeddings.row(b).data(), d));
    }
    return total;
}

double full_loss(const EmbeddingState& state, const TrainingBatch& batch, const EdgeWeightTable* weights,
                 ObjectiveWeights objective) {
    double loss = nce_loss(state, batch.context, batch.negatives, batch.negatives_per_pair);
    if (objective.gamma != 0.0) loss += objective.gamma * clustering_cost(state, batch.nodes);
    if (objective.lambda != 0.0 && weights != nullptr) {
        loss += objective.lambda * smoothness_cost(state, batch.context.traversed_edges, *weights);
    }
    return loss;
}

GradientBuffer::GradientBuffer(std::size_t node_count, std::size_t clusters, std::size_t dims)
    : nodes_(node_count, dims),
      centers_(clusters, dims),
      node_mark_(node_count, 0),
      center_mark_(clusters, 0) {}

std::span<double> GradientBuffer::node_row(NodeId v) {
    if (!node_mark_[v]) {
        node_mark_[v] = 1;
        touched_nodes_.push_back(v);
    }
    return nodes_.row(v);
}

std::span<double> GradientBuffer::center_row(ClusterId c) {
    if (!center_mark_[c]) {
        center_mark_[c] = 1;
        touched_centers_.push_back(c);
    }
    return centers_.row(c);
}

void GradientBuffer::clear() {
    for (NodeId v : touched_nodes_) {
        std::fill(nodes_.row(v).begin(), nodes_.row(v).end(), 0.0);
        node_mark_[v] = 0;
    }
    for (ClusterId c : touched_centers_) {
        std::fill(centers_.row(c).begin(), centers_.row(c).end(), 0.0);
        center_mark_[c] = 0;
    }
    touched_nodes_.clear();
    touched_centers_.clear();
}

double accumulate_gradient(const EmbeddingState& state, const TrainingBatch& batch,
                           const EdgeWeightTable* weights, ObjectiveWeights objective,
                           GradientBuffer& grads) {
    const auto& kern = kernels::active();
    const std::size_t d = state.dims();
    const std::size_t k = batch.negatives_per_pair;
    const auto& pairs = batch.context.pairs;
    check_negatives(batch.context, batch.negatives, k);
    if (grads.dims() != d || grads.node_count() != state.embeddings.rows() ||
        grads.cluster_count() != state.centers.rows()) {
        throw InputError("gradient buffer shape does not match the model");
    }
    const Matrix& f = state.embeddings;
    double loss = 0.0;

    if (!pairs.empty()) {
        const double scale = 1.0 / static_cast<double>(pairs.size());
        double nce = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [v, n] = pairs[i];
            const double* fv = f.row(v).data();
            const double* fn = f.row(n).data();
            const double pos = kern.dot(fv, fn, d);
            const Sigmoid sp = sigmoid_and_log(pos);
            nce -= sp.log;
            // d/dx -log σ(x) = σ(x) - 1
            const double c_pos = scale * (sp.value - 1.0);
            kern.axpy(c_pos, fn, grads.node_row(v).data(), d);
            kern.axpy(c_pos, fv, grads.node_row(n).data(), d);
            for (std::size_t j = 0; j < k; ++j) {
                const NodeId u = batch.negatives[i * k + j];
                const double* fu = f.row(u).data();
                const double neg = kern.dot(fv, fu, d);
                const Sigmoid sn = sigmoid_and_log(neg);
                nce -= sn.log_neg;
                // d/dx -log σ(-x) = σ(x)
                const double c_neg = scale * sn.value;
                kern.axpy(c_neg, fu, grads.node_row(v).data(), d);
                kern.axpy(c_neg, fv, grads.node_row(u).data(), d);
            }
        }
        loss += nce * scale;
    }

    if (objective.gamma != 0.0) {
        double cluster = 0.0;
        for (NodeId v : batch.nodes) {
            const auto fv = f.row(v);
            const auto [c, dist] = closest_center(state, v);
            cluster += dist;
            auto center_grad = grads.center_row(c);
            if (dist == 0.0) continue;
            const double coef = objective.gamma / dist;
            const auto mu = state.centers.row(c);
            kern.axpy_diff(coef, fv.data(), mu.data(), grads.node_row(v).data(), d);
            kern.axpy_diff(-coef, fv.data(), mu.data(), center_grad.data(), d);
        }
        loss += objective.gamma * cluster;
    }

    if (objective.lambda != 0.0 && weights != nullptr) {
        double smooth = 0.0;
        for (const auto& [a, b] : batch.context.traversed_edges) {
            const double w = weights->weight(a, b);
            const double* fa = f.row(a).data();
            const double* fb = f.row(b).data();
            const double dist = std::sqrt(kern.squared_distance(fa, fb, d));
            smooth += w * dist;
            if (dist == 0.0 || w == 0.0) continue;
            const double coef = objective.lambda * w / dist;
            kern.axpy_diff(coef, fa, fb, grads.node_row(a).data(), d);
            kern.axpy_diff(coef, fb, fa, grads.node_row(b).data(), d);
        }
        loss += objective.lambda * smooth;
    }
    return loss;
}

std::vector<double> grad_node(const EmbeddingState& state, NodeId v, const TrainingBatch& batch,
                              const EdgeWeightTable* weights, ObjectiveWeights objective) {
    GradientBuffer grads(state.embeddings.rows(), state.centers.rows(), state.dims());
    accumulate_gradient(state, batch, weights, objective, grads);
    const auto row = grads.node_gradient(v);
    return {row.begin(), row.end()};
}

Matrix grad_centers(const EmbeddingState& state, std::span<const NodeId> nodes, double gamma) {
    const auto& kern = kernels::active();
    const std::size_t d = state.dims();
    Matrix out(state.centers.rows(), d);
    if (gamma == 0.0) return out;
    for (NodeId v : nodes) {
        const auto [c, dist] = closest_center(state, v);
        if (dist == 0.0) continue;
        kern.axpy_diff(-gamma / dist, state.embeddings.row(v).data(), state.centers.row(c).data(),
                       out.row(c).data(), d);
    }
    return out;
}

void adam_update(EmbeddingState& state, const GradientBuffer& grads, double alpha, const AdamParams& params) {
    const std::size_t d = state.dims();
    if (grads.dims() != d || grads.node_count() != state.embeddings.rows() ||
        grads.cluster_count() != state.centers.rows()) {
        throw InputError("gradient shape does not match the model");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const kernels::AdamCoefficients coef{params.beta1,
                                         params.beta2,
                                         params.epsilon,
                                         alpha,
                                         1.0 - std::pow(params.beta1, t),
                                         1.0 - std::pow(params.beta2, t)};
    const auto& kern = kernels::active();
    for (NodeId v : grads.touched_nodes()) {
        kern.adam_step(state.embeddings.row(v).data(), state.embedding_m.row(v).data(),
                       state.embedding_v.row(v).data(), grads.node_gradient(v).data(), d, coef);
    }
    for (ClusterId c : grads.touched_centers()) {
        kern.adam_step(state.centers.row(c).data(), state.center_m.row(c).data(), state.center_v.row(c).data(),
                       grads.center_gradient(c).data(), d, coef);
    }
}

}  // namespace gemsec
