#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace cmm {

// SplitMix64 finalizer, used for seeding and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministic random stream (xoshiro256++ core). Streams are value types:
// copy freely, and derive independent child streams with split(). Splitting
// depends only on the stream's seed lineage, never on how much has been
// consumed, so (seed, key...) fully names a stream.
class RngStream {
public:
    static RngStream seeded(std::uint64_t seed) { return RngStream(seed); }

    RngStream split(std::uint64_t key) const {
        return RngStream(mix64(lineage_ ^ mix64(key)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    // Standard normal via Box-Muller (the second draw of each pair is
    // discarded to keep the stream state a plain counter of calls).
    double normal() {
        double u1 = uniform01();
        const double u2 = uniform01();
        if (u1 < 0x1.0p-100) u1 = 0x1.0p-100;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double sigma) { return sigma * normal(); }

private:
    explicit RngStream(std::uint64_t seed) : lineage_(seed) {
        std::uint64_t s = seed;
        for (auto& word : s_) {
            s = mix64(s);
            word = s;
        }
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t lineage_;
    std::uint64_t s_[4];
};

} // namespace cmm
