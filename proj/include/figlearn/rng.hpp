#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace figlearn {

// Seeded generator with hand-rolled distributions. std::mt19937_64 output is
// pinned by the standard, but the std distributions are not; rolling our own
// keeps sequences identical across standard libraries and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // Independent stream for worker `stream` of a run seeded with `seed`.
    static Rng for_stream(uint64_t seed, uint64_t stream) {
        return Rng(mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1)));
    }

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + next_double() * (b - a); }

    // Uniform in [0, n). Rejection sampling keeps the distribution exact.
    uint64_t uniform_int(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

    bool bernoulli(double p) { return next_double() < p; }

    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Binomial by direct simulation; counts here are participant-sized.
    int binomial(int n, double p) {
        int k = 0;
        for (int i = 0; i < n; ++i) {
            k += bernoulli(p) ? 1 : 0;
        }
        return k;
    }

    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace figlearn
