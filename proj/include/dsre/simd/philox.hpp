#pragma once

#include <array>
#include <cstdint>

namespace dsre::simd {

// Philox-4x32-10 counter-based generator. A block cipher over a 128-bit
// counter with a 64-bit key: any (counter, key) pair is O(1)-addressable,
// which is what makes chunk-parallel simulation deterministic without
// jump-ahead bookkeeping.

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

struct PhiloxBlock {
    uint32_t x[4];
};

inline PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                              uint32_t k0, uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c0;
        const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c2;
        const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
        const uint32_t lo0 = static_cast<uint32_t>(p0);
        const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
        const uint32_t lo1 = static_cast<uint32_t>(p1);
        const uint32_t n0 = hi1 ^ c1 ^ k0;
        const uint32_t n1 = lo1;
        const uint32_t n2 = hi0 ^ c3 ^ k1;
        const uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return PhiloxBlock{{c0, c1, c2, c3}};
}

// Maps a pair of 32-bit words to a double in the open interval (0,1).
// 52 mantissa bits are kept so the integer part converts exactly.
inline double u01(uint32_t hi, uint32_t lo) {
    const uint64_t v = (static_cast<uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(v >> 12) + 0.5) * 0x1.0p-52;
}

// Stream layout: key carries the seed, the counter encodes (draw slot,
// stream tag, 64-bit step). Negative steps (warm-up) wrap in two's
// complement, which stays collision-free.
enum class StreamTag : uint32_t {
    M = 0,          // scalar innovation stream
    Q = 1,          // additive-noise stream
    Aux = 2,        // detached draws (backward sampler, oracles)
    Replica = 16,   // per-replica diagnostics streams use Replica + r
};

inline PhiloxBlock draw_block(uint64_t seed, uint32_t tag, int64_t step, uint32_t slot) {
    const uint64_t s = static_cast<uint64_t>(step);
    return philox4x32(slot, tag, static_cast<uint32_t>(s), static_cast<uint32_t>(s >> 32),
                      static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32));
}

} // namespace dsre::simd
