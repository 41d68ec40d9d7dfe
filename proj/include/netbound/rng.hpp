#pragma once

#include <cstdint>
#include <random>

namespace netbound {

// Reproducible random draws. std::uniform_int_distribution is
// implementation-defined, so sampling is done by rejection on the raw
// 64-bit stream; identical seeds give identical values on any platform.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    std::uint64_t next() { return gen(); }

    // uniform in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen();
        } while (x >= limit);
        return x % n;
    }

    // uniform in [lo, hi] inclusive
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }
};

}  // namespace netbound
