#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gemsec/noise.hpp"
#include "oracles.hpp"

using namespace gemsec;

TEST_CASE("unigram weights are degree^0.75 over non-isolated nodes") {
    // star with 3 leaves plus an isolated node
    const Graph g = oracle::make_graph(5, {{0, 1}, {0, 2}, {0, 3}});
    const auto d = NoiseDistribution::from_graph(g);
    const double hub = std::pow(3.0, 0.75);
    const double total = hub + 3.0;
    const auto p = d.probabilities();
    REQUIRE(p.size() == 5);
    CHECK(p[0] == doctest::Approx(hub / total));
    for (int leaf = 1; leaf <= 3; ++leaf) CHECK(p[leaf] == doctest::Approx(1.0 / total));
    CHECK(p[4] == 0.0);
    CHECK(d.support_size() == 4);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("uniform noise gives equal mass to non-isolated nodes") {
    const Graph g = oracle::make_graph(5, {{0, 1}, {0, 2}, {0, 3}});
    const auto d = NoiseDistribution::from_graph(g, NoiseKind::uniform);
    for (int v = 0; v < 4; ++v) CHECK(d.probabilities()[v] == doctest::Approx(0.25));
    CHECK(d.probabilities()[4] == 0.0);
}

TEST_CASE("alias sampling reproduces the probabilities") {
    const Graph g = oracle::karate().graph;
    const auto d = NoiseDistribution::from_graph(g);
    const int draws = 200000;
    std::vector<double> count(g.node_count(), 0.0);
    Rng rng(8);
    for (int i = 0; i < draws; ++i) count[d.sample(rng)] += 1.0;
    const auto p = d.probabilities();
    for (std::size_t v = 0; v < count.size(); ++v) {
        const double sigma = std::sqrt(draws * p[v] * (1.0 - p[v]));
        CHECK(std::abs(count[v] - draws * p[v]) <= 4.0 * sigma);
    }
}

TEST_CASE("isolated nodes are never drawn") {
    const Graph g = oracle::make_graph(6, {{0, 1}, {2, 3}});
    const auto d = NoiseDistribution::from_graph(g);
    Rng rng(2);
    for (int i = 0; i < 20000; ++i) {
        const NodeId v = d.sample(rng);
        CHECK(v <= 3);
    }
}

TEST_CASE("sample_excluding never returns the excluded node") {
    const Graph g = oracle::make_graph(3, {{0, 1}, {1, 2}});
    const auto d = NoiseDistribution::from_graph(g);
    Rng rng(5);
    std::vector<double> count(3, 0.0);
    for (int i = 0; i < 10000; ++i) {
        const NodeId v = d.sample_excluding(1, rng);
        CHECK(v != 1);
        count[v] += 1.0;
    }
    // the two leaves keep equal mass among themselves
    CHECK(std::abs(count[0] - count[2]) <= 3.0 * std::sqrt(10000.0 * 0.25) * 2.0);

    const Graph single = oracle::make_graph(3, {{0, 1}});
    const auto w = NoiseDistribution::from_weights(std::vector<double>{0.0, 1.0, 0.0});
    CHECK_THROWS_AS(w.sample_excluding(1, rng), InputError);
    CHECK(w.sample_excluding(0, rng) == 1);
}

TEST_CASE("invalid weight vectors") {
    CHECK_THROWS_AS(NoiseDistribution::from_weights(std::vector<double>{}), InputError);
    CHECK_THROWS_AS(NoiseDistribution::from_weights(std::vector<double>{0.0, 0.0}), InputError);
    CHECK_THROWS_AS(NoiseDistribution::from_weights(std::vector<double>{1.0, -0.5}), InputError);
}
