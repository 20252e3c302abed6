#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

// Polynomial kernels shared by the scalar reference and the SIMD backends.
// Everything here is written with plain IEEE multiply/add (no fma, no
// reassociation) so that a vector lane and the scalar fallback compute
// bit-identical results. Translation units including this header are
// compiled with -ffp-contract=off.

namespace dsre::simd {

namespace vm {

// log() after fdlibm: reduce to x = 2^k * m with m in [sqrt(2)/2, sqrt(2)),
// then a degree-14 rational-style polynomial in s = (m-1)/(m+1).
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLg1 = 6.666666666666735130e-01;
inline constexpr double kLg2 = 3.999999999940941908e-01;
inline constexpr double kLg3 = 2.857142874366239149e-01;
inline constexpr double kLg4 = 2.222219843214978396e-01;
inline constexpr double kLg5 = 1.818357216161805012e-01;
inline constexpr double kLg6 = 1.531383769920937332e-01;
inline constexpr double kLg7 = 1.479819860511658591e-01;

// Taylor coefficients of sin((pi/2)x) and cos((pi/2)x) on |x| <= 1/2.
inline constexpr double kS0 = 1.5707963267948966192;
inline constexpr double kS1 = -0.64596409750624625366;
inline constexpr double kS2 = 0.079692626246167045121;
inline constexpr double kS3 = -0.0046817541353186881007;
inline constexpr double kS4 = 0.00016044118478735982187;
inline constexpr double kS5 = -3.5988432352120853405e-6;
inline constexpr double kS6 = 5.6921729219679268118e-8;
inline constexpr double kS7 = -6.6880351098114672325e-10;

inline constexpr double kC1 = -1.2337005501361698274;
inline constexpr double kC2 = 0.25366950790104801364;
inline constexpr double kC3 = -0.020863480763352960873;
inline constexpr double kC4 = 0.00091926027483942658024;
inline constexpr double kC5 = -2.5202042373060605481e-5;
inline constexpr double kC6 = 4.7108747788181715037e-7;
inline constexpr double kC7 = -6.3866030837918522411e-9;
inline constexpr double kC8 = 6.5659631149794723622e-11;

} // namespace vm

// Natural log for positive, finite, normal x. ~1-2 ulp.
inline double vlog(double x) {
    const uint64_t bits = std::bit_cast<uint64_t>(x);
    const uint64_t e = (bits >> 52) & 0x7ffu;
    const uint64_t mant_hi = (bits >> 32) & 0xfffffu;
    const uint64_t i = (mant_hi + 0x95f64u) & 0x100000u;
    const uint64_t new_hi = mant_hi | (i ^ 0x3ff00000u);
    const double m = std::bit_cast<double>((new_hi << 32) | (bits & 0xffffffffu));
    const uint64_t kb = e + (i >> 20);
    const double dk = static_cast<double>(kb) - 1023.0;

    const double f = m - 1.0;
    const double s = f / (2.0 + f);
    const double z = s * s;
    const double w = z * z;
    const double t1 = w * (vm::kLg2 + w * (vm::kLg4 + w * vm::kLg6));
    const double t2 = z * (vm::kLg1 + w * (vm::kLg3 + w * (vm::kLg5 + w * vm::kLg7)));
    const double r = t2 + t1;
    const double hfsq = 0.5 * f * f;
    return dk * vm::kLn2Hi - ((hfsq - (s * (hfsq + r) + dk * vm::kLn2Lo)) - f);
}

// sin/cos of 2*pi*u for u in (0,1): quadrant reduction on v = 4u, then the
// half-turn Taylor polynomials above. No pi rounding enters the reduction.
inline void vsincos_2pi(double u, double* sin_out, double* cos_out) {
    const double v = 4.0 * u;
    const double n = std::floor(v + 0.5);
    const double r = v - n;
    const double q = n - 4.0 * std::floor(n * 0.25);

    const double z = r * r;
    const double sp =
        r * (vm::kS0 +
             z * (vm::kS1 +
                  z * (vm::kS2 +
                       z * (vm::kS3 +
                            z * (vm::kS4 + z * (vm::kS5 + z * (vm::kS6 + z * vm::kS7)))))));
    const double cp =
        1.0 + z * (vm::kC1 +
                   z * (vm::kC2 +
                        z * (vm::kC3 +
                             z * (vm::kC4 +
                                  z * (vm::kC5 + z * (vm::kC6 + z * (vm::kC7 + z * vm::kC8)))))));

    const bool swap = (q == 1.0) || (q == 3.0);
    const double s_mag = swap ? cp : sp;
    const double c_mag = swap ? sp : cp;
    *sin_out = (q >= 2.0) ? -s_mag : s_mag;
    *cos_out = ((q == 1.0) || (q == 2.0)) ? -c_mag : c_mag;
}

// Box-Muller: one (z0,z1) standard-normal pair from two (0,1) uniforms.
inline void boxmuller(double u1, double u2, double* z0, double* z1) {
    const double r = std::sqrt(-2.0 * vlog(u1));
    double s, c;
    vsincos_2pi(u2, &s, &c);
    *z0 = r * c;
    *z1 = r * s;
}

} // namespace dsre::simd
