#pragma once

#include <cstdint>
#include <random>

namespace gemsec {

using Rng = std::mt19937_64;

// Independent stream salts. A stream is identified by (seed, salt, a, b), so
// walk sampling and negative sampling for the same source node never share
// state.
enum class Stream : std::uint64_t {
    shuffle = 1,
    walk = 2,
    negatives = 3,
    init = 4,
    kmeans = 5,
    generator = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream salt, std::uint64_t a = 0,
                                    std::uint64_t b = 0) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(salt));
    h = splitmix64(h ^ a);
    return splitmix64(h ^ b);
}

inline Rng make_rng(std::uint64_t seed, Stream salt, std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(stream_seed(seed, salt, a, b));
}

}  // namespace gemsec
