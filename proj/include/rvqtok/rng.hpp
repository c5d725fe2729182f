#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rvqtok {

// Deterministic PRNG with named sub-streams. Every random choice in the
// project draws from Rng(root_seed, "stream-name") so components can be
// re-seeded independently and runs are reproducible across platforms.
// Core generator is splitmix64; distributions are hand-rolled so results
// do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    Rng(uint64_t root_seed, std::string_view stream) {
        uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the stream name
        for (char c : stream) {
            h ^= static_cast<uint8_t>(c);
            h *= 0x100000001b3ull;
        }
        state_ = root_seed ^ h;
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
        next();  // decorrelate nearby seeds
    }

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) {
        // rejection sampling to avoid modulo bias
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rvqtok
