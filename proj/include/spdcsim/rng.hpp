#pragma once

#include <cmath>
#include <cstdint>

namespace spdcsim {

// Self-contained generators so streams are reproducible across standard
// libraries. xoshiro256** seeded through splitmix64.

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next()
    {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

class Rng {
public:
    explicit Rng(std::uint64_t seed)
    {
        SplitMix64 sm(seed);
        for (auto& w : s_)
            w = sm.next();
    }
    /// Substream k of a master seed (counter-derived, independent states).
    static Rng substream(std::uint64_t master, std::uint64_t k)
    {
        return Rng(SplitMix64(master ^ (0x6a09e667f3bcc909ULL + k * 0x9e3779b97f4a7c15ULL)).next());
    }

    std::uint64_t next()
    {
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

    /// Uniform in (0, 1), strictly positive (safe under log).
    double uniform()
    {
        return ((next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exponential with the given rate (1/s).
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Standard normal via Box-Muller (two uniforms per call, no caching).
    double gaussian()
    {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace spdcsim
