#include "dsre/simd/kernels.hpp"

#include "dsre/simd/philox.hpp"
#include "dsre/simd/vmath.hpp"

#include <cmath>

namespace dsre::simd {

namespace {

void normal_pairs_scalar(uint64_t seed, uint32_t tag, uint32_t slot, int64_t step0,
                         size_t n, double* z0, double* z1) {
    for (size_t i = 0; i < n; ++i) {
        const PhiloxBlock b = draw_block(seed, tag, step0 + static_cast<int64_t>(i), slot);
        const double u1 = u01(b.x[0], b.x[1]);
        const double u2 = u01(b.x[2], b.x[3]);
        boxmuller(u1, u2, &z0[i], &z1[i]);
    }
}

size_t find_above_scalar(const double* vals, size_t n, double thresh, uint32_t* idx) {
    size_t m = 0;
    for (size_t i = 0; i < n; ++i) {
        if (vals[i] > thresh) idx[m++] = static_cast<uint32_t>(i);
    }
    return m;
}

size_t find_abs_above_scalar(const double* vals, size_t n, double thresh, uint32_t* idx) {
    size_t m = 0;
    for (size_t i = 0; i < n; ++i) {
        if (std::fabs(vals[i]) > thresh) idx[m++] = static_cast<uint32_t>(i);
    }
    return m;
}

} // namespace

const Kernels kScalarKernels = {
    "scalar",
    normal_pairs_scalar,
    find_above_scalar,
    find_abs_above_scalar,
};

} // namespace dsre::simd
