#pragma once

#include "dsre/simd/philox.hpp"
#include "dsre/simd/vmath.hpp"

#include <cstdint>

namespace dsre {

// A per-(seed, tag, step) substream of uniforms. One philox block per slot;
// the slot counter free-runs, so variable-consumption samplers (rejection
// loops) stay deterministic. The bulk engine kernels address the exact same
// (seed, tag, step, slot) lattice, which is what makes scalar sampling and
// chunked SIMD generation interchangeable.
class CounterStream {
public:
    CounterStream(uint64_t seed, uint32_t tag, int64_t step)
        : seed_(seed), tag_(tag), step_(step) {}

    simd::PhiloxBlock next_block() { return simd::draw_block(seed_, tag_, step_, slot_++); }

    double next_u01() {
        const simd::PhiloxBlock b = next_block();
        return simd::u01(b.x[0], b.x[1]);
    }

    void next_normal_pair(double* z0, double* z1) {
        const simd::PhiloxBlock b = next_block();
        simd::boxmuller(simd::u01(b.x[0], b.x[1]), simd::u01(b.x[2], b.x[3]), z0, z1);
    }

    double next_normal() {
        double z0, z1;
        next_normal_pair(&z0, &z1);
        return z0;
    }

    uint64_t seed() const { return seed_; }
    uint32_t tag() const { return tag_; }
    int64_t step() const { return step_; }
    uint32_t slot() const { return slot_; }

private:
    uint64_t seed_;
    uint32_t tag_;
    int64_t step_;
    uint32_t slot_ = 0;
};

} // namespace dsre
