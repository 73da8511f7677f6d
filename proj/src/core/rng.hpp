#pragma once

#include <cstdint>

namespace ramlt {

// PCG32: counter-based generator with independent streams. The same
// (seed, stream) pair always produces the same sequence, and distinct
// stream ids select distinct increments so per-chain sequences do not
// overlap in practice.
class RandomSequence {
public:
    RandomSequence() { reseed(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL); }
    RandomSequence(uint64_t seed, uint64_t stream) { reseed(seed, stream); }

    void reseed(uint64_t seed, uint64_t stream) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    uint32_t next_below(uint32_t n) {
        return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
    }

private:
    uint64_t state_ = 0;
    uint64_t inc_ = 0;
};

} // namespace ramlt
