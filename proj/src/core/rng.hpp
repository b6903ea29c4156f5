#pragma once

#include <cmath>
#include <cstdint>

namespace wbwt {

// SplitMix64: 64-bit state, portable, seed-stable across platforms. All
// randomized stages in the toolkit draw from this generator so corpora and
// training runs reproduce byte-for-byte from a seed.
inline uint64_t splitmix64_next(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// One-shot mixer for deriving child seeds from (seed, index) tuples.
inline uint64_t mix64(uint64_t x) {
    uint64_t s = x;
    return splitmix64_next(s);
}

// Source of uniform draws. Virtual so tests can script exact draw sequences
// against the hand-traced examples.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual double uniform() = 0;                  // [0, 1)
    virtual uint64_t uniform_int(uint64_t n) = 0;  // [0, n), n >= 1
};

class SplitMix64 final : public RandomSource {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() { return splitmix64_next(state_); }

    double uniform() override {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Debiased bounded draw (Lemire's method).
    uint64_t uniform_int(uint64_t n) override {
        uint64_t x = next();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        uint64_t lo = static_cast<uint64_t>(m);
        if (lo < n) {
            uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next();
                m = static_cast<unsigned __int128>(x) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    // Box-Muller; consumes two draws per pair, caches the second.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace wbwt
