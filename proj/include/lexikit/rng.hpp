#pragma once

#include <array>
#include <cstdint>

namespace lexikit {

// All randomness in the library flows through this generator so that outputs
// are reproducible across platforms and worker counts. The standard <random>
// distributions are implementation-defined, hence the explicit algorithms.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stable stream derivation: seed for (master, stream, index) is obtained by
// feeding master, then stream, then index through splitmix64 steps. Scene i,
// sample i, etc. each get an independent stream, which is what makes parallel
// and serial generation byte-identical.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0x9E3779B97F4A7C15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= index * 0xD1B54A32D192ED03ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1 | b >> 63) ^ c;
}

// Stream tags used by the library (documented so external tooling can
// reproduce any derived stream).
enum : std::uint64_t {
    kStreamRender = 1,      // glyph_synth base renders
    kStreamArtifact = 2,    // glyph_synth correction artifacts
    kStreamScene = 3,       // word_composer scenes
    kStreamSplit = 4,       // dataset split assignment
    kStreamSceneRetry = 5,  // scene re-layout after a placement failure
};

// xoshiro256++ seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased uniform in [0, bound) via rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x > limit);
        return x % bound;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_;
};

}  // namespace lexikit
