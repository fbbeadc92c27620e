#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace crown {

// Deterministic random source. All randomized operations in the library draw
// from one of these, seeded explicitly, so runs are byte-reproducible.
// Bounded sampling avoids std::uniform_int_distribution, whose output is
// implementation-defined; the raw mt19937_64 stream is standardized.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, bound), bound > 0 (Lemire's multiply-shift rejection)
    std::uint64_t uniform(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                m = static_cast<__uint128_t>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::uint32_t uniform32(std::uint32_t bound) {
        return static_cast<std::uint32_t>(uniform(bound));
    }

    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Child stream derived from the construction seed and a label; lets
    // stages draw independently without coupling their consumption.
    Rng split(std::uint64_t label) const { return Rng(mix(seed_ ^ mix(label))); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace crown
