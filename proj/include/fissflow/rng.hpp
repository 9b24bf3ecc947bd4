#pragma once

#include <cstdint>

namespace fissflow {

// SplitMix64: the output sequence depends only on the 64-bit state it was
// seeded with, so any implementation language reproduces the same stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]; safe as a log() argument
    double next_open_double() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // independent substream k of a master seed (counter-based derivation)
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t k) {
        SplitMix64 mixer(seed ^ (0xA0761D6478BD642FULL * (k + 1)));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

}  // namespace fissflow
