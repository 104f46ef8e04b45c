#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace cambrian {

/// Seeded random source owned by a single run.
class Random {
public:
    using engine_type = std::mt19937_64;

    explicit Random(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    /// Uniform on (0, 1]; used for genome magnitudes so that no entry is ever exactly zero.
    double magnitude() { return 1.0 - uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

    /// Uniform integer in [lo, hi].
    std::size_t between(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_); }

    bool coin() { return index(2) == 1; }

    /// k distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample(std::size_t n, std::size_t k);

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
};

inline std::vector<std::size_t> Random::sample(std::size_t n, std::size_t k)
{
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    if (k > n) {
        k = n;
    }
    // partial Fisher-Yates
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[between(i, n - 1)]);
    }
    pool.resize(k);
    return pool;
}

} // namespace cambrian
