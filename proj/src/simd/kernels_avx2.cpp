#include "dsre/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include "dsre/simd/philox.hpp"
#include "dsre/simd/vmath.hpp"

#include <immintrin.h>

// AVX2 variants of the scalar kernels. Same operations, four or eight lanes
// at a time; the remainder of each array falls through to the shared scalar
// code so output is bit-identical to the scalar backend for any n.

namespace dsre::simd {

namespace {

// hi/lo 32-bit products of 8 u32 lanes with a broadcast constant.
inline void mulhilo8(__m256i a, uint32_t mconst, __m256i* hi, __m256i* lo) {
    const __m256i m = _mm256_set1_epi32(static_cast<int>(mconst));
    const __m256i even = _mm256_mul_epu32(a, m);
    const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
    *lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
    *hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

// Eight philox blocks for steps step0..step0+7 (SoA over the four words).
inline void philox8(uint64_t seed, uint32_t tag, uint32_t slot, int64_t step0,
                    __m256i* x0, __m256i* x1, __m256i* x2, __m256i* x3) {
    alignas(32) uint32_t c2buf[8];
    alignas(32) uint32_t c3buf[8];
    for (int i = 0; i < 8; ++i) {
        const uint64_t s = static_cast<uint64_t>(step0 + i);
        c2buf[i] = static_cast<uint32_t>(s);
        c3buf[i] = static_cast<uint32_t>(s >> 32);
    }
    __m256i c0 = _mm256_set1_epi32(static_cast<int>(slot));
    __m256i c1 = _mm256_set1_epi32(static_cast<int>(tag));
    __m256i c2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(c2buf));
    __m256i c3 = _mm256_load_si256(reinterpret_cast<const __m256i*>(c3buf));
    uint32_t k0 = static_cast<uint32_t>(seed);
    uint32_t k1 = static_cast<uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        __m256i hi0, lo0, hi1, lo1;
        mulhilo8(c0, kPhiloxM0, &hi0, &lo0);
        mulhilo8(c2, kPhiloxM1, &hi1, &lo1);
        const __m256i k0v = _mm256_set1_epi32(static_cast<int>(k0));
        const __m256i k1v = _mm256_set1_epi32(static_cast<int>(k1));
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0v);
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1v);
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    *x0 = c0;
    *x1 = c1;
    *x2 = c2;
    *x3 = c3;
}

// (0,1) uniforms from four u64 words; matches scalar u01().
inline __m256d u01x4(__m256i v) {
    const __m256i t = _mm256_srli_epi64(v, 12);
    const __m256i magic = _mm256_or_si256(t, _mm256_set1_epi64x(0x4330000000000000LL));
    const __m256d ti = _mm256_sub_pd(_mm256_castsi256_pd(magic), _mm256_set1_pd(0x1.0p52));
    return _mm256_mul_pd(_mm256_add_pd(ti, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1.0p-52));
}

inline __m256d vlog4(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i e = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
    const __m256i mant_hi =
        _mm256_and_si256(_mm256_srli_epi64(bits, 32), _mm256_set1_epi64x(0xfffff));
    const __m256i i = _mm256_and_si256(_mm256_add_epi64(mant_hi, _mm256_set1_epi64x(0x95f64)),
                                       _mm256_set1_epi64x(0x100000));
    const __m256i new_hi = _mm256_or_si256(mant_hi, _mm256_xor_si256(i, _mm256_set1_epi64x(0x3ff00000)));
    const __m256i new_bits = _mm256_or_si256(_mm256_slli_epi64(new_hi, 32),
                                             _mm256_and_si256(bits, _mm256_set1_epi64x(0xffffffffLL)));
    const __m256d m = _mm256_castsi256_pd(new_bits);
    const __m256i kb = _mm256_add_epi64(e, _mm256_srli_epi64(i, 20));
    const __m256d kbd = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(kb, _mm256_set1_epi64x(0x4330000000000000LL))),
        _mm256_set1_pd(0x1.0p52));
    const __m256d dk = _mm256_sub_pd(kbd, _mm256_set1_pd(1023.0));

    const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    __m256d t1 = _mm256_mul_pd(w, _mm256_set1_pd(vm::kLg6));
    t1 = _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(vm::kLg4), t1));
    t1 = _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(vm::kLg2), t1));
    __m256d t2 = _mm256_mul_pd(w, _mm256_set1_pd(vm::kLg7));
    t2 = _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(vm::kLg5), t2));
    t2 = _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(vm::kLg3), t2));
    t2 = _mm256_mul_pd(z, _mm256_add_pd(_mm256_set1_pd(vm::kLg1), t2));
    const __m256d r = _mm256_add_pd(t2, t1);
    const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), f), f);
    const __m256d sterm = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)),
                                        _mm256_mul_pd(dk, _mm256_set1_pd(vm::kLn2Lo)));
    const __m256d inner = _mm256_sub_pd(_mm256_sub_pd(hfsq, sterm), f);
    return _mm256_sub_pd(_mm256_mul_pd(dk, _mm256_set1_pd(vm::kLn2Hi)), inner);
}

inline __m256d poly_sin(__m256d r, __m256d z) {
    __m256d p = _mm256_set1_pd(vm::kS7);
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS6), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS5), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS4), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS3), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS2), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS1), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kS0), _mm256_mul_pd(z, p));
    return _mm256_mul_pd(r, p);
}

inline __m256d poly_cos(__m256d z) {
    __m256d p = _mm256_set1_pd(vm::kC8);
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC7), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC6), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC5), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC4), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC3), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC2), _mm256_mul_pd(z, p));
    p = _mm256_add_pd(_mm256_set1_pd(vm::kC1), _mm256_mul_pd(z, p));
    return _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(z, p));
}

inline void vsincos_2pi4(__m256d u, __m256d* sv, __m256d* cv) {
    const __m256d v = _mm256_mul_pd(_mm256_set1_pd(4.0), u);
    const __m256d n = _mm256_floor_pd(_mm256_add_pd(v, _mm256_set1_pd(0.5)));
    const __m256d r = _mm256_sub_pd(v, n);
    const __m256d q = _mm256_sub_pd(
        n, _mm256_mul_pd(_mm256_set1_pd(4.0),
                         _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.25)))));
    const __m256d z = _mm256_mul_pd(r, r);
    const __m256d sp = poly_sin(r, z);
    const __m256d cp = poly_cos(z);

    const __m256d q1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d q2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d q3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
    const __m256d swap = _mm256_or_pd(q1, q3);
    const __m256d s_mag = _mm256_blendv_pd(sp, cp, swap);
    const __m256d c_mag = _mm256_blendv_pd(cp, sp, swap);
    const __m256d sneg = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_GE_OQ);
    const __m256d cneg = _mm256_or_pd(q1, q2);
    const __m256d signbit = _mm256_set1_pd(-0.0);
    *sv = _mm256_xor_pd(s_mag, _mm256_and_pd(sneg, signbit));
    *cv = _mm256_xor_pd(c_mag, _mm256_and_pd(cneg, signbit));
}

inline void boxmuller4(__m256d u1, __m256d u2, __m256d* z0, __m256d* z1) {
    const __m256d r =
        _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), vlog4(u1)));
    __m256d s, c;
    vsincos_2pi4(u2, &s, &c);
    *z0 = _mm256_mul_pd(r, c);
    *z1 = _mm256_mul_pd(r, s);
}

void normal_pairs_avx2(uint64_t seed, uint32_t tag, uint32_t slot, int64_t step0,
                       size_t n, double* z0, double* z1) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i x0, x1, x2, x3;
        philox8(seed, tag, slot, step0 + static_cast<int64_t>(i), &x0, &x1, &x2, &x3);
        // u64 words (x0<<32)|x1 and (x2<<32)|x3; unpack yields lane order
        // {0,1,4,5} / {2,3,6,7}, restored by the 128-bit permutes below.
        const __m256i u1a = _mm256_unpacklo_epi32(x1, x0);
        const __m256i u1b = _mm256_unpackhi_epi32(x1, x0);
        const __m256i u2a = _mm256_unpacklo_epi32(x3, x2);
        const __m256i u2b = _mm256_unpackhi_epi32(x3, x2);
        __m256d z0a, z1a, z0b, z1b;
        boxmuller4(u01x4(u1a), u01x4(u2a), &z0a, &z1a);
        boxmuller4(u01x4(u1b), u01x4(u2b), &z0b, &z1b);
        _mm256_storeu_pd(z0 + i, _mm256_permute2f128_pd(z0a, z0b, 0x20));
        _mm256_storeu_pd(z0 + i + 4, _mm256_permute2f128_pd(z0a, z0b, 0x31));
        _mm256_storeu_pd(z1 + i, _mm256_permute2f128_pd(z1a, z1b, 0x20));
        _mm256_storeu_pd(z1 + i + 4, _mm256_permute2f128_pd(z1a, z1b, 0x31));
    }
    for (; i < n; ++i) {
        const PhiloxBlock b = draw_block(seed, tag, step0 + static_cast<int64_t>(i), slot);
        boxmuller(u01(b.x[0], b.x[1]), u01(b.x[2], b.x[3]), &z0[i], &z1[i]);
    }
}

size_t find_above_avx2(const double* vals, size_t n, double thresh, uint32_t* idx) {
    size_t m = 0;
    size_t i = 0;
    const __m256d t = _mm256_set1_pd(thresh);
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(vals + i);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, t, _CMP_GT_OQ));
        if (mask) {
            for (int b = 0; b < 4; ++b) {
                if (mask & (1 << b)) idx[m++] = static_cast<uint32_t>(i + b);
            }
        }
    }
    for (; i < n; ++i) {
        if (vals[i] > thresh) idx[m++] = static_cast<uint32_t>(i);
    }
    return m;
}

size_t find_abs_above_avx2(const double* vals, size_t n, double thresh, uint32_t* idx) {
    size_t m = 0;
    size_t i = 0;
    const __m256d t = _mm256_set1_pd(thresh);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_and_pd(_mm256_loadu_pd(vals + i), absmask);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, t, _CMP_GT_OQ));
        if (mask) {
            for (int b = 0; b < 4; ++b) {
                if (mask & (1 << b)) idx[m++] = static_cast<uint32_t>(i + b);
            }
        }
    }
    for (; i < n; ++i) {
        if (std::fabs(vals[i]) > thresh) idx[m++] = static_cast<uint32_t>(i);
    }
    return m;
}

} // namespace

const Kernels kAvx2Kernels = {
    "avx2",
    normal_pairs_avx2,
    find_above_avx2,
    find_abs_above_avx2,
};

} // namespace dsre::simd

#endif // x86-64
