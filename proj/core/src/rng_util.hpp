#ifndef RELINK_RNG_UTIL_HPP
#define RELINK_RNG_UTIL_HPP

// Pinned randomness primitives. Everything seeded flows through
// std::mt19937_64 (whose output sequence the C++ standard fixes) plus the
// explicit helpers below, so shuffles, samples and synthetic corpora
// reproduce bit-for-bit across platforms and stdlib implementations.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace relink::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Per-key substream seed: deterministic in (seed, key) and independent of
/// the order keys are processed in.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    return splitmix64(seed ^ fnv1a64(key));
}

/// Uniform integer in [0, n), n >= 1, by rejection (no modulo bias).
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x > limit);
    return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace relink::detail

#endif  // RELINK_RNG_UTIL_HPP
