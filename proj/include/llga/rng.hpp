#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace llga {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** random stream. Hand-rolled so that runs are reproducible
/// bit-for-bit across compilers and standard libraries; std:: distributions
/// are implementation-defined and would break the determinism contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound >= 1. Lemire's multiply-shift
    /// with rejection, so the result is exactly uniform.
    std::uint64_t uniform_below(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0ULL - bound) % bound;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Per-run seed for replicate `rep` of size `n`: FNV-1a over the run
/// coordinates mixed with the base seed through SplitMix64. Adding
/// replicates or sizes never reshuffles the seeds of existing runs.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view algorithm,
                                 std::uint64_t n, std::uint64_t rep) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    feed(algorithm.data(), algorithm.size());
    feed(&n, sizeof n);
    feed(&rep, sizeof rep);
    std::uint64_t mix = h ^ base_seed;
    return splitmix64(mix);
}

}  // namespace llga
