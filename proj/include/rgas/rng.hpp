#pragma once

#include <cstdint>
#include <cmath>

#include "rgas/geometry.hpp"

namespace rgas {

// splitmix64; used to expand seeds and to derive per-sample streams.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based stream derivation: sample index -> independent seed.
// Worker assignment never touches this, so results are worker-count invariant.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// xoshiro256** (Blackman/Vigna, public domain reference implementation).
struct Rng {
    std::uint64_t s[4];

    explicit Rng(std::uint64_t seed = 0x2545f4914f6cdd1dull) {
        std::uint64_t sm = seed;
        for (auto& w : s) w = splitmix64(sm);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // uniform in [0,1)
    double u01() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * u01(); }

    // standard normal, Marsaglia polar with a cached spare
    double gauss() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u, v, q;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    Vec3 gauss3(double sigma) { return {sigma * gauss(), sigma * gauss(), sigma * gauss()}; }

    // uniform on the unit sphere (Marsaglia)
    Vec3 sphere() {
        double u, v, q;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0);
        double f = 2.0 * std::sqrt(1.0 - q);
        return {u * f, v * f, 1.0 - 2.0 * q};
    }

    Vec3 box01() { return {u01(), u01(), u01()}; }

    // exponential with unit rate
    double exponential() {
        double u;
        do { u = u01(); } while (u <= 0.0);
        return -std::log(u);
    }

  private:
    double spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace rgas
