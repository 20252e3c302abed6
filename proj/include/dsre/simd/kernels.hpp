#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dsre::simd {

// Data-parallel inner loops, selected at runtime. Each entry has a scalar
// reference implementation and (on x86-64) an AVX2 variant producing
// bit-identical output; equivalence is asserted in the test suite.
struct Kernels {
    const char* name;

    // One Box-Muller pair per step: step0+i draws its two uniforms from
    // philox(slot, tag, step0+i) under `seed` and writes (z0[i], z1[i]).
    void (*normal_pairs)(uint64_t seed, uint32_t tag, uint32_t slot, int64_t step0,
                         size_t n, double* z0, double* z1);

    // Indices i with vals[i] > thresh (strict), in increasing order.
    size_t (*find_above)(const double* vals, size_t n, double thresh, uint32_t* idx);

    // Indices i with |vals[i]| > thresh (strict), in increasing order.
    size_t (*find_abs_above)(const double* vals, size_t n, double thresh, uint32_t* idx);
};

// Active kernel table. First call resolves: DSRE_SIMD env var if set
// ("scalar" or "avx2"), otherwise the best backend the CPU supports.
const Kernels& kernels();

// Force a backend by name ("scalar", "avx2", "auto"). Returns false if the
// backend is unavailable on this machine. Intended for tests and tools.
bool select_backend(std::string_view name);

std::vector<std::string> available_backends();

extern const Kernels kScalarKernels;
#if defined(__x86_64__) || defined(_M_X64)
extern const Kernels kAvx2Kernels;
bool avx2_supported();
#endif

} // namespace dsre::simd
