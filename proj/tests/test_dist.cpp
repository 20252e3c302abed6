#include <doctest.h>

#include "dsre/dist/quadrature.hpp"
#include "dsre/dist/scalar_dist.hpp"
#include "dsre/tail/solver.hpp"

#include <cmath>
#include <random>

using namespace dsre;

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

double mc_abs_moment(const AffineFactor& f, double s, size_t n, uint64_t seed, double* se_out) {
    CounterStream stream(seed, static_cast<uint32_t>(simd::StreamTag::Aux), 12345);
    double sum = 0.0, sumsq = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double v = std::pow(std::fabs(f.sample(stream)), s);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    *se_out = std::sqrt(var / n);
    return mean;
}

// E|cN|^s by the Gamma closed form (test-side oracle)
double normal_abs_moment(double c, double s) {
    return std::exp(s * std::log(std::fabs(c)) + 0.5 * s * std::log(2.0) +
                    std::lgamma(0.5 * (s + 1.0)) - 0.5 * std::log(M_PI));
}

} // namespace

TEST_CASE("adaptive quadrature basics") {
    auto r = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // integrable endpoint singularity
    r = quad::integrate([](double x) { return std::log(x); }, 0.0, 1.0, 1e-11);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-9));

    // oscillatory
    r = quad::integrate([](double x) { return std::sin(50.0 * x); }, 0.0, M_PI);
    CHECK(r.value == doctest::Approx((1.0 - std::cos(50.0 * M_PI)) / 50.0).epsilon(1e-9));
}

TEST_CASE("abs_moment closed forms and quadrature agree") {
    const AffineFactor n1{0.0, 1.0, ScalarDist::standard_normal()};
    CHECK(abs_moment(n1, 0.0) == 1.0);
    CHECK(abs_moment(n1, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

    const double c2 = std::pow(1.0 / 3.0, 0.25);
    const AffineFactor n2{0.0, c2, ScalarDist::standard_normal()};
    CHECK(abs_moment(n2, 4.0) == doctest::Approx(1.0).epsilon(1e-12));

    const AffineFactor chi{0.1, 0.9, ScalarDist::chi_square_1()};
    CHECK(abs_moment(chi, 1.0) == doctest::Approx(1.0).epsilon(1e-11));

    // quadrature path (b != 0) against the Gamma closed form via expect()
    const ScalarDist norm = ScalarDist::standard_normal();
    for (double s : {0.7, 1.9, 3.3}) {
        auto r = expect(norm, [s](double m) { return std::pow(std::fabs(m), s); });
        CHECK(r.value == doctest::Approx(normal_abs_moment(1.0, s)).epsilon(1e-11));
    }

    // E[(0.1+0.9*Z^2)^2] = 0.01 + 0.2*1 + 0.81*3
    CHECK(abs_moment(chi, 2.0) == doctest::Approx(0.01 + 0.18 + 0.81 * 3.0).epsilon(1e-11));

    const AffineFactor pm{0.0, 1.0, ScalarDist::point_mass(3.0)};
    CHECK(abs_moment(pm, 2.5) == doctest::Approx(std::pow(3.0, 2.5)));
}

TEST_CASE("abs_moment matches Monte Carlo within 4 SE on random factors") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> uc(0.3, 1.2);
    std::uniform_real_distribution<double> ub(0.0, 0.4);
    std::uniform_real_distribution<double> us(0.5, 3.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int kind = rep % 3;
        AffineFactor f;
        if (kind == 0) {
            f = {0.0, uc(gen), ScalarDist::standard_normal()};
        } else if (kind == 1) {
            f = {ub(gen), uc(gen), ScalarDist::chi_square_1()};
        } else {
            f = {ub(gen), uc(gen),
                 ScalarDist::tabulated({{0.0, 0.4}, {1.0, 0.8}, {2.0, 0.0}})};
        }
        const double s = us(gen);
        double se = 0.0;
        const double mc = mc_abs_moment(f, s, 1000000, gen(), &se);
        const double q = abs_moment(f, s);
        CHECK(std::fabs(mc - q) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("log abs_moment is convex in s") {
    std::mt19937_64 gen(515);
    std::uniform_real_distribution<double> us(0.1, 5.0);
    const AffineFactor chi{0.1, 0.9, ScalarDist::chi_square_1()};
    const AffineFactor nrm{0.2, 0.8, ScalarDist::standard_normal()};
    for (const auto& f : {chi, nrm}) {
        for (int rep = 0; rep < 20; ++rep) {
            double s1 = us(gen), s2 = us(gen), s3 = us(gen);
            if (s1 > s2) std::swap(s1, s2);
            if (s2 > s3) std::swap(s2, s3);
            if (s1 > s2) std::swap(s1, s2);
            if (s3 - s1 < 1e-3) continue;
            const double t = (s2 - s1) / (s3 - s1);
            const double lhs = std::log(abs_moment(f, s2));
            const double rhs =
                (1.0 - t) * std::log(abs_moment(f, s1)) + t * std::log(abs_moment(f, s3));
            CHECK(lhs <= rhs + 1e-9);
        }
    }
}

TEST_CASE("log_moment values") {
    const AffineFactor pm{0.0, 1.0, ScalarDist::point_mass(0.5)};
    CHECK(log_moment(pm) == doctest::Approx(std::log(0.5)).epsilon(1e-14));

    // E log|N| = -(gamma + log 2)/2
    const AffineFactor n1{0.0, 1.0, ScalarDist::standard_normal()};
    const double expected = -0.5 * (kEulerGamma + std::log(2.0));
    CHECK(log_moment(n1) == doctest::Approx(expected).epsilon(1e-10));

    const AffineFactor chi{0.1, 0.9, ScalarDist::chi_square_1()};
    CHECK(log_moment(chi) < 0.0);

    // MC cross-check for the chi-square case
    CounterStream stream(5, static_cast<uint32_t>(simd::StreamTag::Aux), 1);
    double sum = 0.0, sumsq = 0.0;
    const size_t n = 1000000;
    for (size_t i = 0; i < n; ++i) {
        const double v = std::log(std::fabs(chi.sample(stream)));
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::fabs(mean - log_moment(chi)) <= 4.0 * se);
}

TEST_CASE("sampling basics") {
    CounterStream s1(11, 0, 0);
    const AffineFactor pm{0.0, 1.0, ScalarDist::point_mass(3.0)};
    CHECK(pm.sample(s1) == 3.0);

    const AffineFactor chi{0.1, 0.9, ScalarDist::chi_square_1()};
    CounterStream s2(12, 0, 0);
    double mean = 0.0;
    const size_t n = 1000000;
    double minv = 1e300;
    CounterStream s3(13, 1, 7);
    for (size_t i = 0; i < n; ++i) {
        const double v = chi.sample(s3);
        minv = std::min(minv, v);
        mean += v;
    }
    mean /= n;
    CHECK(minv >= 0.1);
    // E[0.1 + 0.9 Z^2] = 1, sd of one draw = 0.9*sqrt(2)
    const double se = 0.9 * std::sqrt(2.0 / static_cast<double>(n));
    CHECK(std::fabs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("tabulated law: construction, sampling, moments") {
    CHECK_THROWS_AS(ScalarDist::tabulated({{0.0, 1.0}, {1.0, 3.0}}), ConfigError);
    CHECK_THROWS_AS(ScalarDist::tabulated({{0.0, -1.0}, {1.0, 1.0}}), ConfigError);

    // uniform on [0,1]
    const auto unif = ScalarDist::tabulated({{0.0, 1.0}, {1.0, 1.0}});
    CounterStream s(21, 2, 3);
    double mean = 0.0, m2 = 0.0;
    const size_t n = 400000;
    for (size_t i = 0; i < n; ++i) {
        const double v = unif.sample(s);
        mean += v;
        m2 += v * v;
    }
    mean /= n;
    m2 /= n;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.005));
    CHECK(m2 == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    const AffineFactor fu{0.0, 1.0, unif};
    CHECK(abs_moment(fu, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(abs_moment(fu, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    // triangle on [0,2]: mean = 4/3
    const auto tri = ScalarDist::tabulated({{0.0, 0.0}, {2.0, 1.0}});
    const AffineFactor ft{0.0, 1.0, tri};
    CHECK(abs_moment(ft, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CounterStream s2(22, 2, 4);
    double tmean = 0.0;
    for (size_t i = 0; i < n; ++i) tmean += tri.sample(s2);
    CHECK(tmean / n == doctest::Approx(4.0 / 3.0).epsilon(0.01));
}

TEST_CASE("tilted sampler: point mass and normal alpha=2") {
    const AffineFactor pm{0.0, 1.0, ScalarDist::point_mass(1.0)};
    TiltedSampler tpm(pm, 5.0); // |1|^5 = 1, normalized
    CounterStream s(31, 4, 0);
    CHECK(tpm.sample(s) == 1.0);

    const AffineFactor n1{0.0, 1.0, ScalarDist::standard_normal()};
    TiltedSampler tn(n1, 2.0);
    CounterStream s2(32, 4, 1);
    const size_t n = 200000;
    double m2 = 0.0, mlog = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double m = tn.sample(s2);
        m2 += m * m;
        mlog += std::log(std::fabs(m));
    }
    m2 /= n;
    mlog /= n;
    // E^tilt[M^2] = E[M^4] = 3
    CHECK(m2 == doctest::Approx(3.0).epsilon(0.02));
    // drift mu_{1|1} = d/ds E|M|^s at s=2 = (log 2 + psi(1.5))/2 > 0
    const double h = 1e-6;
    const double psi15 = (std::lgamma(1.5 + h) - std::lgamma(1.5 - h)) / (2.0 * h);
    const double mu = 0.5 * (std::log(2.0) + psi15);
    CHECK(mu > 0.0);
    CHECK(mlog == doctest::Approx(mu).epsilon(0.05));
    // quadrature route for the same drift
    const double mu_quad = tilted_cross_moment(n1, 2.0, n1);
    CHECK(mu_quad == doctest::Approx(mu).epsilon(1e-7));

    CHECK_THROWS_AS(TiltedSampler(n1, 2.5), TiltNotNormalized);
}

TEST_CASE("tilted rejection vs importance weighting CIs overlap") {
    std::mt19937_64 gen(808);
    std::uniform_real_distribution<double> uc(0.4, 1.1);
    std::uniform_real_distribution<double> ub(0.05, 0.3);
    for (int rep = 0; rep < 6; ++rep) {
        AffineFactor f = (rep % 2 == 0)
                             ? AffineFactor{0.0, uc(gen), ScalarDist::standard_normal()}
                             : AffineFactor{ub(gen), uc(gen), ScalarDist::chi_square_1()};
        double alpha;
        try {
            alpha = solve_alpha(f);
        } catch (const Error&) {
            continue;
        }
        if (alpha > 4.5) continue; // keep the rejection envelope usable
        TiltedSampler ts(f, alpha);
        CounterStream sr(900 + rep, 4, 0);
        const size_t n = 60000;
        // test functions: m, m^2, log|b+cm|
        double r1 = 0, r2 = 0, r3 = 0, q1 = 0, q2 = 0, q3 = 0;
        double v1 = 0, v2 = 0, v3 = 0;
        std::vector<double> xs(n);
        for (size_t i = 0; i < n; ++i) xs[i] = ts.sample(sr);
        for (const double m : xs) {
            const double w = std::log(std::fabs(f.b + f.c * m));
            r1 += m;
            r2 += m * m;
            r3 += w;
        }
        r1 /= n;
        r2 /= n;
        r3 /= n;
        for (const double m : xs) {
            const double w = std::log(std::fabs(f.b + f.c * m));
            v1 += (m - r1) * (m - r1);
            v2 += (m * m - r2) * (m * m - r2);
            v3 += (w - r3) * (w - r3);
        }
        const double se1 = std::sqrt(v1 / n / n), se2 = std::sqrt(v2 / n / n),
                     se3 = std::sqrt(v3 / n / n);

        // self-normalized importance weighting from the base law
        CounterStream sb(1900 + rep, 4, 1);
        double wsum = 0, s1 = 0, s2 = 0, s3 = 0;
        std::vector<double> ws(n), m1s(n), m2s(n), m3s(n);
        for (size_t i = 0; i < n; ++i) {
            const double m = f.dist.sample(sb);
            const double w = std::pow(std::fabs(f.b + f.c * m), alpha);
            ws[i] = w;
            m1s[i] = m;
            m2s[i] = m * m;
            m3s[i] = std::log(std::fabs(f.b + f.c * m));
            wsum += w;
            s1 += w * m1s[i];
            s2 += w * m2s[i];
            s3 += w * m3s[i];
        }
        q1 = s1 / wsum;
        q2 = s2 / wsum;
        q3 = s3 / wsum;
        double iv1 = 0, iv2 = 0, iv3 = 0;
        for (size_t i = 0; i < n; ++i) {
            iv1 += ws[i] * ws[i] * (m1s[i] - q1) * (m1s[i] - q1);
            iv2 += ws[i] * ws[i] * (m2s[i] - q2) * (m2s[i] - q2);
            iv3 += ws[i] * ws[i] * (m3s[i] - q3) * (m3s[i] - q3);
        }
        const double ise1 = std::sqrt(iv1) / wsum, ise2 = std::sqrt(iv2) / wsum,
                     ise3 = std::sqrt(iv3) / wsum;

        // 99% CI overlap
        auto overlap = [](double a, double sa, double b, double sb2) {
            return std::fabs(a - b) <= 2.576 * (sa + sb2);
        };
        CHECK(overlap(r1, se1, q1, ise1));
        CHECK(overlap(r2, se2, q2, ise2));
        CHECK(overlap(r3, se3, q3, ise3));
    }
}

TEST_CASE("solve_alpha on the named configurations") {
    const AffineFactor f1{0.0, 1.0, ScalarDist::standard_normal()};
    CHECK(solve_alpha(f1) == doctest::Approx(2.0).epsilon(1e-6));

    const AffineFactor f2{0.0, std::pow(1.0 / 3.0, 0.25), ScalarDist::standard_normal()};
    CHECK(solve_alpha(f2) == doctest::Approx(4.0).epsilon(1e-6));

    const AffineFactor f3{0.1, 0.9, ScalarDist::chi_square_1()};
    CHECK(std::fabs(solve_alpha(f3) - 1.0) < 1e-9);

    // c = positive root of 3c^2 + 0.2c + 0.01 = 1
    const double c4 = (-0.2 + std::sqrt(0.04 + 12.0 * 0.99)) / 6.0;
    const AffineFactor f4{0.1, c4, ScalarDist::chi_square_1()};
    CHECK(std::fabs(solve_alpha(f4) - 2.0) < 1e-4);

    CHECK_THROWS_AS(solve_alpha(AffineFactor{0.0, 2.0, ScalarDist::standard_normal()}),
                    StationarityViolated);
    CHECK_THROWS_AS(solve_alpha(AffineFactor{0.0, 1.0, ScalarDist::point_mass(0.5)}),
                    NoRootInRange);
}

TEST_CASE("solver invariants: residual, scaling law, ordering") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> ul(0.5, 1.5);
    const double c0 = 0.8;
    for (int rep = 0; rep < 8; ++rep) {
        const double lam = ul(gen);
        const AffineFactor f{0.0, c0 * lam, ScalarDist::standard_normal()};
        double a;
        try {
            a = solve_alpha(f);
        } catch (const StationarityViolated&) {
            continue;
        }
        CHECK(std::fabs(abs_moment(f, a) - 1.0) <= 1e-9);
        // independent root of s*log(c(lam)) + s/2 log2 + lgamma((s+1)/2) - log sqrt(pi)
        auto gfun = [&](double s) {
            return s * std::log(c0 * lam) + 0.5 * s * std::log(2.0) +
                   std::lgamma(0.5 * (s + 1.0)) - 0.5 * std::log(M_PI);
        };
        double lo = 1e-8, hi = 64.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gfun(mid) < 0.0 ? lo : hi) = mid;
        }
        CHECK(a == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
    }

    // Case I' ordering: larger coefficient, heavier tail
    const double a1 = solve_alpha(AffineFactor{0.0, 0.7, ScalarDist::standard_normal()});
    const double a2 = solve_alpha(AffineFactor{0.0, 0.9, ScalarDist::standard_normal()});
    CHECK(a2 < a1);
}

TEST_CASE("tilted drift Case I identity: mu_{2|1} - mu_{1|1} = log(c2/c1)") {
    const AffineFactor f1{0.0, std::pow(1.0 / 3.0, 0.25), ScalarDist::standard_normal()};
    const AffineFactor f2{0.0, 1.0, ScalarDist::standard_normal()};
    const double alpha1 = solve_alpha(f1);
    const double mu11 = tilted_cross_moment(f1, alpha1, f1);
    const double mu21 = tilted_cross_moment(f1, alpha1, f2);
    CHECK(mu21 - mu11 == doctest::Approx(std::log(f2.c / f1.c)).epsilon(1e-9));
    CHECK(mu11 > 0.0);
}
