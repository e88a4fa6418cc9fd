#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gemsec/graph.hpp"
#include "gemsec/model.hpp"

namespace gemsec {

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double loss = 0.0;      // mean minibatch full_loss over the epoch's updates
    double gamma = 0.0;     // value at the last step of the epoch
    double alpha = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    EmbeddingState state;
    std::vector<EpochLog> log;
    double seconds = 0.0;  // optimization loop only
};

struct TrainOptions {
    std::ostream* corpus = nullptr;  // receives every sampled walk when set
    // Called after every parameter update with the schedule step t.
    std::function<void(const EmbeddingState&, std::uint64_t)> on_step;
};

// For each of N epochs: shuffle nodes; for each source node advance t, set γ
// and α from the schedules, sample one walk, extract its window pairs and
// apply one Adam update. Walks from isolated nodes produce no update.
// Walk production can run on cfg.workers threads; updates are applied by the
// calling thread in epoch order, so results depend only on the seed.
TrainResult train(const Graph& g, const TrainConfig& cfg, const TrainOptions& options = {});

}  // namespace gemsec
