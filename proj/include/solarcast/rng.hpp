#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace solarcast {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used both as a sequential
/// generator and as a counter-based hash so every random stream is a pure
/// function of (seed, index) and runs are reproducible byte-for-byte.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_streams(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ b);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Top 53 bits -> (0, 1]; never returns 0 so it is log-safe.
inline double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Stateful deterministic generator for initialization and resampling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return unit_from_bits(next()); }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    /// Unbiased-enough index draw via 128-bit multiply (Lemire reduction).
    std::size_t next_below(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Counter-based stream: value at index i is independent of evaluation order,
/// so overlapping date spans reproduce the same weather draws.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t stream) : stream_(stream) {}

    double uniform_at(std::int64_t index) const {
        return unit_from_bits(hash_index(2 * index));
    }

    /// Box-Muller from two counter draws.
    double normal_at(std::int64_t index) const {
        const double u1 = unit_from_bits(hash_index(2 * index));
        const double u2 = unit_from_bits(hash_index(2 * index + 1));
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t hash_index(std::int64_t i) const {
        return splitmix64(stream_ ^ splitmix64(static_cast<std::uint64_t>(i)));
    }

    std::uint64_t stream_;
};

}  // namespace solarcast
