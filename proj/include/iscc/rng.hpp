#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace iscc {

/// Seeded random source with named substreams.
///
/// Every run derives all of its randomness from one 64-bit base seed.
/// Substreams are identified by (name, index) so that e.g. the process-noise
/// stream of Monte-Carlo run 17 is the same for every scheme that simulates
/// run 17 (common random numbers), and adding a new consumer never perturbs
/// existing streams.
class Rng {
public:
    Rng(std::uint64_t base_seed, std::string_view stream, std::uint64_t index = 0)
        : engine_(mix(base_seed, fnv1a(stream), index)) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Poisson draw; mean must be modest (inversion by sequential search).
    int poisson(double mean) {
        std::poisson_distribution<int> d(mean);
        return d(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    static std::uint64_t splitmix(std::uint64_t& state) {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_hash, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix(s);
        s ^= stream_hash;
        std::uint64_t b = splitmix(s);
        s ^= index * 0xD1B54A32D192ED03ull + 1;
        std::uint64_t c = splitmix(s);
        return a ^ (b << 1) ^ c;
    }

    std::mt19937_64 engine_;
};

}  // namespace iscc
