#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spikelasso {

/// Deterministic random source built on std::mt19937_64.
///
/// The distribution transforms are spelled out here instead of using
/// <random>'s distribution classes: the standard fixes the engine output
/// but not the distributions, and byte-identical runs for a given seed
/// are part of this library's contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derive an independent stream from (seed, stream_id) via splitmix64.
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard Box-Muller transform; two engine draws per variate.
    double normal(double mean, double stddev) {
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    /// Exponential variate with the given rate (> 0).
    double exponential(double rate) {
        return -std::log1p(-uniform01()) / rate;
    }

    /// Uniform integer in [0, n). n must be >= 1.
    std::uint64_t uniform_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace spikelasso
