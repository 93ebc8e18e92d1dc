#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace aspp {

using Rng = std::mt19937_64;

/// splitmix64 finalizer, used only to spread seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Stream tags keep the trait draws and the market draws of a path independent.
enum class StreamPurpose : std::uint64_t {
    Traits = 0x5452414954530001ull,
    Market = 0x4d41524b45540002ull,
};

/// Seed of substream `index` under `purpose`; a pure function of its arguments,
/// so any worker can recreate any path's stream.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, StreamPurpose purpose,
                                    std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(master_seed) ^ static_cast<std::uint64_t>(purpose)) ^
                      index);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double canonical(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double on [lo, hi].
inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * canonical(rng);
}

/// Standard normal via Box-Muller; consumes exactly two engine draws per call.
inline double standard_normal(Rng& rng) {
    const double u1 = 1.0 - canonical(rng);  // (0, 1], keeps the log finite
    const double u2 = canonical(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Unbiased uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// Partial Fisher-Yates: after the call the first `m` entries of `pool` are a
/// uniform draw without replacement from the pool's contents. The pool must be
/// a permutation of the index range; it stays one, so it can be reused.
inline void draw_active_set(Rng& rng, std::span<std::size_t> pool, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
}

}  // namespace aspp
