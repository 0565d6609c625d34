#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace cohort::detail {

// std::uniform_int_distribution and std::shuffle are implementation defined;
// these helpers pin the exact draw sequence so seeded outputs are portable.

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling; bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound)
{
    auto limit = Rng::max() - (Rng::max() % bound);
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform integer in [lo, hi].
inline std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi)
{
    return lo + uniform_below(rng, hi - lo + 1);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p)
{
    return uniform_unit(rng) < p;
}

/// Fisher-Yates shuffle with the draw sequence fixed above.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng)
{
    for (std::size_t i = values.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

/// Picks k distinct positions out of [0, n) (partial Fisher-Yates), in draw order.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k)
{
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    for (std::size_t i = 0; i < k && i < n; ++i) {
        auto j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(std::min(k, n));
    return pool;
}

/// FNV-1a, used to derive stable per-key seeds.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key)
{
    auto h = fnv1a(key, 0xcbf29ce484222325ULL ^ (seed * 0x9E3779B97F4A7C15ULL));
    // splitmix64 finalizer
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

}  // namespace cohort::detail
