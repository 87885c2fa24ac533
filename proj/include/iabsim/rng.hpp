#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace iabsim {

/// splitmix64 step; also used to mix stream labels into seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a label.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t s = base ^ 0x6a09e667f3bcc909ULL;
    for (char c : label) {
        s ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        splitmix64(s);
    }
    return splitmix64(s);
}

/// Deterministic 64-bit RNG stream (xoshiro256**). All stochastic draws in
/// the simulator flow through named instances of this class; distribution
/// transforms are implemented here so results do not depend on the standard
/// library's unspecified algorithms.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // Modulo bias is negligible for the small n used here.
        return n == 0 ? 0 : next_u64() % n;
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Exponential with the given rate (events per unit).
    double exponential(double rate) {
        double u = uniform();
        return -std::log1p(-u) / rate;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Stateless uniform draw from a key tuple; used where a decision must be a
/// pure function of its inputs (e.g. the random path policy).
inline std::uint64_t hash_draw(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= a;
    splitmix64(s);
    s ^= b;
    return splitmix64(s);
}

}  // namespace iabsim
