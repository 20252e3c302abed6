#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsre/simd/kernels.hpp"
#include "dsre/simd/philox.hpp"
#include "dsre/simd/vmath.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace dsre;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Random123 kat_vectors, philox4x32 rounds=10
    {
        const auto b = simd::philox4x32(0, 0, 0, 0, 0, 0);
        CHECK(b.x[0] == 0x6627e8d5u);
        CHECK(b.x[1] == 0xe169c58du);
        CHECK(b.x[2] == 0xbc57ac4cu);
        CHECK(b.x[3] == 0x9b00dbd8u);
    }
    {
        const auto b = simd::philox4x32(0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu,
                                        0xffffffffu, 0xffffffffu);
        CHECK(b.x[0] == 0x408f276du);
        CHECK(b.x[1] == 0x41c83b0eu);
        CHECK(b.x[2] == 0xa20bc7c6u);
        CHECK(b.x[3] == 0x6d5451fdu);
    }
    {
        const auto b = simd::philox4x32(0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u,
                                        0xa4093822u, 0x299f31d0u);
        CHECK(b.x[0] == 0xd16cfe09u);
        CHECK(b.x[1] == 0x94fdccebu);
        CHECK(b.x[2] == 0x5001e420u);
        CHECK(b.x[3] == 0x24126ea1u);
    }
}

TEST_CASE("u01 range and determinism") {
    for (uint64_t s = 0; s < 2000; ++s) {
        const auto b = simd::draw_block(42, 0, static_cast<int64_t>(s), 0);
        const double u = simd::u01(b.x[0], b.x[1]);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    const auto b1 = simd::draw_block(7, 3, -5, 2);
    const auto b2 = simd::draw_block(7, 3, -5, 2);
    CHECK(std::memcmp(b1.x, b2.x, sizeof(b1.x)) == 0);
}

TEST_CASE("vlog matches libm within a few ulp") {
    std::mt19937_64 gen(123);
    std::uniform_real_distribution<double> uexp(-40.0, 40.0);
    double max_rel = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double x = std::exp(uexp(gen));
        const double got = simd::vlog(x);
        const double want = std::log(x);
        const double err = std::fabs(got - want) / std::max(std::fabs(want), 1e-30);
        if (std::fabs(want) > 1e-10) max_rel = std::max(max_rel, err);
        CHECK(std::fabs(got - want) <=
              4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(want)));
    }
    CHECK(max_rel < 1e-14);
}

TEST_CASE("vsincos_2pi matches libm") {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> u01d(1e-12, 1.0 - 1e-12);
    for (int i = 0; i < 200000; ++i) {
        const double u = u01d(gen);
        double s, c;
        simd::vsincos_2pi(u, &s, &c);
        const double ref_s = std::sin(2.0 * M_PI * u);
        const double ref_c = std::cos(2.0 * M_PI * u);
        CHECK(std::fabs(s - ref_s) < 5e-15);
        CHECK(std::fabs(c - ref_c) < 5e-15);
        CHECK(s * s + c * c == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("boxmuller sample moments") {
    const size_t n = 2000000;
    std::vector<double> z0(n), z1(n);
    simd::kScalarKernels.normal_pairs(99, 0, 0, 0, n, z0.data(), z1.data());
    double m1 = 0, m2 = 0, m4 = 0, cross = 0;
    for (size_t i = 0; i < n; ++i) {
        m1 += z0[i];
        m2 += z0[i] * z0[i];
        m4 += z0[i] * z0[i] * z0[i] * z0[i];
        cross += z0[i] * z1[i];
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    cross /= n;
    CHECK(std::fabs(m1) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(m4 == doctest::Approx(3.0).epsilon(0.02));
    CHECK(std::fabs(cross) < 4.0 / std::sqrt(static_cast<double>(n)));
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels bit-equal to scalar reference") {
    if (!simd::avx2_supported()) return;
    std::mt19937_64 gen(777);
    for (int rep = 0; rep < 20; ++rep) {
        const uint64_t seed = gen();
        const uint32_t tag = static_cast<uint32_t>(gen() % 5);
        const uint32_t slot = static_cast<uint32_t>(gen() % 3);
        const int64_t step0 = static_cast<int64_t>(gen() % 1000000) - 500000;
        const size_t n = 1 + gen() % 300;
        std::vector<double> a0(n), a1(n), b0(n), b1(n);
        simd::kScalarKernels.normal_pairs(seed, tag, slot, step0, n, a0.data(), a1.data());
        simd::kAvx2Kernels.normal_pairs(seed, tag, slot, step0, n, b0.data(), b1.data());
        CHECK(std::memcmp(a0.data(), b0.data(), n * sizeof(double)) == 0);
        CHECK(std::memcmp(a1.data(), b1.data(), n * sizeof(double)) == 0);
    }

    std::uniform_real_distribution<double> vals(-3.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        const size_t n = 1 + gen() % 500;
        std::vector<double> v(n);
        for (auto& x : v) x = vals(gen);
        const double tau = vals(gen);
        std::vector<uint32_t> ia(n), ib(n);
        const size_t ma = simd::kScalarKernels.find_above(v.data(), n, tau, ia.data());
        const size_t mb = simd::kAvx2Kernels.find_above(v.data(), n, tau, ib.data());
        REQUIRE(ma == mb);
        CHECK(std::memcmp(ia.data(), ib.data(), ma * sizeof(uint32_t)) == 0);
        const size_t ma2 = simd::kScalarKernels.find_abs_above(v.data(), n, 1.5, ia.data());
        const size_t mb2 = simd::kAvx2Kernels.find_abs_above(v.data(), n, 1.5, ib.data());
        REQUIRE(ma2 == mb2);
        CHECK(std::memcmp(ia.data(), ib.data(), ma2 * sizeof(uint32_t)) == 0);
    }
}
#endif

TEST_CASE("backend selection honors names") {
    CHECK(simd::select_backend("scalar"));
    CHECK(std::string(simd::kernels().name) == "scalar");
    CHECK_FALSE(simd::select_backend("nonsense"));
    CHECK(simd::select_backend("auto"));
}
