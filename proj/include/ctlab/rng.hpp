#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ctlab {

// Substream derivation and sampling primitives. std:: distributions are not
// bit-stable across standard library implementations, so everything that
// consumes engine output is spelled out here; mt19937_64 itself is fully
// specified by the standard and reproduces the same stream everywhere.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Collision-resistant enough for replica substreams: each tag folds through
// the full 64-bit finalizer before the next is absorbed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(seed);
    for (std::uint64_t t : tags) s = splitmix64(s ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t u64() { return eng_(); }

    // Unbiased integer in [0, n) by 128-bit multiply with rejection.
    std::uint64_t below(std::uint64_t n) {
        unsigned __int128 m = (unsigned __int128)u64() * n;
        std::uint64_t lo = (std::uint64_t)m;
        if (lo < n) {
            std::uint64_t thresh = (0 - n) % n;
            while (lo < thresh) {
                m = (unsigned __int128)u64() * n;
                lo = (std::uint64_t)m;
            }
        }
        return (std::uint64_t)(m >> 64);
    }

    // Uniform on [0,1) with 53 random bits.
    double real01() { return (double)(u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe under log().
    double real01_pos() { return (double)((u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * real01(); }

    bool bernoulli(double p) { return real01() < p; }

    // Box-Muller without caching so the stream position is a pure function of
    // the number of calls.
    double normal() {
        double u1 = real01_pos();
        double u2 = real01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace ctlab
