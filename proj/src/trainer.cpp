#include "gemsec/trainer.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "gemsec/walk.hpp"

namespace gemsec {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Produces the walks of one epoch on several threads and hands them out in
// epoch order. At most `capacity` walks are buffered ahead of the consumer.
class OrderedWalkQueue {
public:
    OrderedWalkQueue(const Graph& g, const WalkConfig& cfg, std::size_t epoch,
                     std::span<const NodeId> order, std::size_t workers, std::size_t capacity)
        : graph_(g), cfg_(cfg), epoch_(epoch), order_(order), slots_(capacity) {
        threads_.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { produce(); });
    }

    ~OrderedWalkQueue() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    OrderedWalkQueue(const OrderedWalkQueue&) = delete;
    OrderedWalkQueue& operator=(const OrderedWalkQueue&) = delete;

    Walk next() {
        std::unique_lock lock(mutex_);
        auto& slot = slots_[consumed_ % slots_.size()];
        cv_.wait(lock, [&] { return slot.has_value() || error_; });
        if (error_) std::rethrow_exception(error_);
        Walk w = std::move(*slot);
        slot.reset();
        ++consumed_;
        lock.unlock();
        cv_.notify_all();
        return w;
    }

private:
    void produce() {
        while (true) {
            std::size_t index = 0;
            {
                std::unique_lock lock(mutex_);
                cv_.wait(lock, [&] {
                    return stop_ || claimed_ >= order_.size() || claimed_ < consumed_ + slots_.size();
                });
                if (stop_ || claimed_ >= order_.size()) return;
                index = claimed_++;
            }
            try {
                Walk w = sample_walk(graph_, cfg_, epoch_, order_[index]);
                {
                    std::lock_guard lock(mutex_);
                    slots_[index % slots_.size()] = std::move(w);
                }
            } catch (...) {
                std::lock_guard lock(mutex_);
                error_ = std::current_exception();
            }
            cv_.notify_all();
        }
    }

    const Graph& graph_;
    const WalkConfig& cfg_;
    std::size_t epoch_;
    std::span<const NodeId> order_;
    std::vector<std::optional<Walk>> slots_;
    std::size_t claimed_ = 0;
    std::size_t consumed_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<std::thread> threads_;
};

[[maybe_unused]] bool touched_rows_finite(const EmbeddingState& s, const GradientBuffer& g) {
    for (NodeId v : g.touched_nodes())
        for (double x : s.embeddings.row(v))
            if (!std::isfinite(x)) return false;
    for (ClusterId c : g.touched_centers())
        for (double x : s.centers.row(c))
            if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

TrainResult train(const Graph& g, const TrainConfig& cfg, const TrainOptions& options) {
    cfg.validate();
    const std::size_t n = g.node_count();
    if (n == 0) throw InputError("cannot train on an empty graph");

    WalkConfig walk_cfg = cfg.walk;
    walk_cfg.seed = cfg.seed;
    const double lambda = cfg.effective_lambda();

    EdgeWeightTable weights;
    if (lambda != 0.0) weights = compute_edge_weights(g);
    const NoiseDistribution noise = NoiseDistribution::from_graph(g, cfg.noise);

    TrainResult result;
    result.state = init_state(n, cfg, cfg.seed);
    EmbeddingState& state = result.state;
    GradientBuffer grads(n, cfg.clusters, cfg.dims);

    const std::uint64_t total = total_steps(cfg, n);
    std::uint64_t t = 0;
    const auto start = Clock::now();
    for (std::size_t epoch = 0; epoch < cfg.walk.walks_per_node; ++epoch) {
        const auto epoch_start = Clock::now();
        const auto order = epoch_order(n, epoch, cfg.seed);
        std::optional<OrderedWalkQueue> queue;
        if (cfg.workers > 1) queue.emplace(g, walk_cfg, epoch, order, cfg.workers, 4 * cfg.workers);

        EpochLog entry;
        entry.epoch = epoch + 1;
        double loss_sum = 0.0;
        std::size_t updates = 0;
        for (const NodeId source : order) {
            ++t;
            const double gamma = gamma_at(t, cfg, total);
            const double alpha = alpha_at(t, cfg, total);
            entry.gamma = gamma;
            entry.alpha = alpha;
            const Walk walk = queue ? queue->next() : sample_walk(g, walk_cfg, epoch, source);
            if (options.corpus != nullptr) write_walk(*options.corpus, walk);
            if (walk.size() < 2) continue;

            Rng neg_rng = make_rng(cfg.seed, Stream::negatives, epoch, source);
            const TrainingBatch batch = make_batch(walk, cfg.walk.window, noise, cfg.negatives, neg_rng,
                                                   cfg.exclude_source_noise);
            const double scale = cfg.weight_scale == WeightScale::pair
                                     ? 1.0 / static_cast<double>(batch.context.pairs.size())
                                     : 1.0;
            loss_sum += accumulate_gradient(state, batch, lambda != 0.0 ? &weights : nullptr,
                                            {gamma * scale, lambda * scale}, grads);
            adam_update(state, grads, alpha);
            assert(touched_rows_finite(state, grads));
            grads.clear();
            ++updates;
            if (options.on_step) options.on_step(state, t);
        }
        entry.loss = updates > 0 ? loss_sum / static_cast<double>(updates) : 0.0;
        entry.seconds = seconds_since(epoch_start);
        result.log.push_back(entry);
    }
    result.seconds = seconds_since(start);
    return result;
}

}  // namespace gemsec
