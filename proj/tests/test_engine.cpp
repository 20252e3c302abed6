#include <doctest.h>

#include "dsre/engine/sinks.hpp"
#include "dsre/engine/stream.hpp"
#include "dsre/models/build.hpp"
#include "dsre/simd/kernels.hpp"
#include "dsre/vsrv/exceedance.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

using namespace dsre;

namespace {

DiagSREModel toy_pointmass_model(double b, double c, double m, std::vector<double> q) {
    DiagSREModel mod;
    mod.d = static_cast<int>(q.size());
    for (int i = 0; i < mod.d; ++i) mod.factors.push_back({b, c, ScalarDist::point_mass(m)});
    mod.q_law = ConstantVector{std::move(q)};
    return mod;
}

std::vector<double> run_buffered(const TrajectoryStream& st) {
    TrajectoryBufferSink buf(st.model.d, st.length);
    std::vector<Sink*> sinks{&buf};
    simulate(st, sinks);
    return buf.data();
}

} // namespace

TEST_CASE("step examples") {
    auto mod = toy_pointmass_model(0.1, 0.9, 0.0, {0.2, 0.1});
    CHECK(step(std::vector<double>{0.0, 0.0}, 123.0, std::vector<double>{1.0, 2.0}, mod) ==
          std::vector<double>{1.0, 2.0});
    const auto s2 = step(std::vector<double>{1.0, 1.0}, 0.0, std::vector<double>{0.2, 0.1}, mod);
    CHECK(s2[0] == doctest::Approx(0.3));
    CHECK(s2[1] == doctest::Approx(0.2));

    DiagSREModel bekk;
    bekk.d = 2;
    bekk.factors = {{0.0, 1.0, ScalarDist::standard_normal()},
                    {0.0, std::pow(1.0 / 3.0, 0.25), ScalarDist::standard_normal()}};
    bekk.q_law = ConstantVector{{0.0, 0.0}};
    const auto s3 = step(std::vector<double>{1.0, 0.0}, 1.0, std::vector<double>{0.0, 0.0}, bekk);
    CHECK(s3[0] == doctest::Approx(1.0));
    CHECK(s3[1] == 0.0); // diagonal action preserves zero coordinates
}

TEST_CASE("simulate length 0 leaves sinks unchanged") {
    TrajectoryStream st;
    st.model = toy_pointmass_model(0.0, 1.0, 0.5, {1.0});
    st.length = 0;
    MinMaxSink mm(1);
    std::vector<Sink*> sinks{&mm};
    simulate(st, sinks);
    CHECK(mm.min(0) > mm.max(0)); // still the empty sentinel state
}

TEST_CASE("point-mass model converges to the affine fixed point") {
    // rho = b + c m = 0.6, q = (1, 2): fixed point q/(1-rho)
    TrajectoryStream st;
    st.model = toy_pointmass_model(0.1, 1.0, 0.5, {1.0, 2.0});
    st.length = 16;
    st.burn_in = 200;
    const auto data = run_buffered(st);
    for (int t = 0; t < 16; ++t) {
        CHECK(data[2 * t] == doctest::Approx(1.0 / 0.4).epsilon(1e-12));
        CHECK(data[2 * t + 1] == doctest::Approx(2.0 / 0.4).epsilon(1e-12));
    }
}

TEST_CASE("determinism across chunk sizes, workers and SIMD backends") {
    const auto fig1 = figure_model(1);
    TrajectoryStream st;
    st.model = fig1.model;
    st.seed = 42;
    st.burn_in = 2000;
    st.length = 60000;
    st.chunk_size = 1 << 20;
    const auto base = run_buffered(st);

    for (const int64_t cs : {int64_t{4096}, int64_t{10000}, int64_t{30000}}) {
        TrajectoryStream alt = st;
        alt.chunk_size = cs;
        const auto got = run_buffered(alt);
        REQUIRE(got.size() == base.size());
        CHECK(std::memcmp(got.data(), base.data(), base.size() * sizeof(double)) == 0);
    }
    for (const int workers : {2, 8}) {
        TrajectoryStream alt = st;
        alt.chunk_size = 8192;
        alt.workers = workers;
        const auto got = run_buffered(alt);
        CHECK(std::memcmp(got.data(), base.data(), base.size() * sizeof(double)) == 0);
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (simd::avx2_supported()) {
        simd::select_backend("scalar");
        const auto scalar_out = run_buffered(st);
        simd::select_backend("avx2");
        const auto avx_out = run_buffered(st);
        simd::select_backend("auto");
        CHECK(std::memcmp(scalar_out.data(), avx_out.data(),
                          scalar_out.size() * sizeof(double)) == 0);
    }
#endif
}

TEST_CASE("coupling warm-up: doubling W changes nothing (point-mass exact)") {
    TrajectoryStream st;
    st.model = toy_pointmass_model(0.1, 1.0, 0.5, {1.0, 2.0});
    st.length = 50000;
    st.burn_in = 100;
    st.chunk_size = 5000;
    st.warmup_override = 1024;
    const auto a = run_buffered(st);
    st.warmup_override = 2048;
    const auto b = run_buffered(st);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("stationarity gate refuses non-stationary models unless forced") {
    DiagSREModel mod;
    mod.d = 1;
    mod.factors = {{0.0, 2.0, ScalarDist::standard_normal()}};
    mod.q_law = ConstantVector{{1.0}};
    TrajectoryStream st;
    st.model = mod;
    st.length = 10;
    st.burn_in = 10;
    MinMaxSink mm(1);
    std::vector<Sink*> sinks{&mm};
    CHECK_THROWS_AS(simulate(st, sinks), ConfigError);
    st.force = true;
    simulate(st, sinks); // no throw
}

TEST_CASE("positivity in Case II models") {
    const auto fig3 = figure_model(3);
    TrajectoryStream st;
    st.model = fig3.model;
    st.seed = 9;
    st.length = 200000;
    st.burn_in = 1000;
    MinMaxSink mm(2);
    std::vector<Sink*> sinks{&mm};
    simulate(st, sinks);
    CHECK(mm.min(0) > 0.0);
    CHECK(mm.min(1) > 0.0);
}

TEST_CASE("backward partial sums") {
    // n=1 is a plain Q draw
    auto mod = toy_pointmass_model(0.0, 1.0, 0.5, {1.5, 2.5});
    CounterStream s(77, static_cast<uint32_t>(simd::StreamTag::Aux), 0);
    const auto one = backward_partial_sums(mod, 1, s);
    CHECK(one[0] == 1.5);
    CHECK(one[1] == 2.5);

    // point-mass M, constant q: partial geometric sum q (1 - rho^n)/(1 - rho)
    CounterStream s2(77, static_cast<uint32_t>(simd::StreamTag::Aux), 1);
    const int n = 17;
    const double rho = 0.5;
    const auto got = backward_partial_sums(mod, n, s2);
    const double expect = 1.5 * (1.0 - std::pow(rho, n)) / (1.0 - rho);
    CHECK(got[0] == doctest::Approx(expect).epsilon(1e-13));

    // forward stationary mean vs backward sample mean (chi-square model)
    DiagSREModel ccc;
    ccc.d = 1;
    ccc.factors = {{0.1, 0.4, ScalarDist::chi_square_1()}};
    ccc.q_law = ConstantVector{{0.3}};
    // E X = 0.3 / (1 - 0.5) = 0.6
    const int reps = 20000;
    double bsum = 0.0, bsq = 0.0;
    for (int r = 0; r < reps; ++r) {
        CounterStream sr(123, static_cast<uint32_t>(simd::StreamTag::Aux), r);
        const double v = backward_partial_sums(ccc, 200, sr)[0];
        bsum += v;
        bsq += v * v;
    }
    const double bmean = bsum / reps;
    const double bse = std::sqrt((bsq / reps - bmean * bmean) / reps);

    TrajectoryStream st;
    st.model = ccc;
    st.seed = 5;
    st.length = 400000;
    st.burn_in = 1000;
    TrajectoryBufferSink buf(1, st.length);
    std::vector<Sink*> sinks{&buf};
    simulate(st, sinks);
    const double fmean =
        std::accumulate(buf.data().begin(), buf.data().end(), 0.0) / st.length;
    // forward SE inflated ~3x for serial correlation at rho = 0.5
    const double fsd = 0.25;
    const double fse = 3.0 * fsd / std::sqrt(static_cast<double>(st.length));
    CHECK(bmean == doctest::Approx(0.6).epsilon(0.02));
    CHECK(std::fabs(bmean - fmean) <= 4.0 * (bse + fse));
}

TEST_CASE("exceedance collector equals full-sort selection (brute force oracle)") {
    const auto fig1 = figure_model(1);
    for (const double q : {0.5, 0.9, 0.999}) {
        TrajectoryStream st;
        st.model = fig1.model;
        st.seed = 31;
        st.length = 10000;
        st.burn_in = 500;
        st.chunk_size = 3000;

        // collector path
        const auto target = static_cast<size_t>(
            std::ceil(static_cast<double>(st.length) * (1.0 - q)));
        ExceedanceCollector coll(fig1.profile.alpha, target, 0);
        TrajectoryBufferSink buf(2, st.length);
        std::vector<Sink*> sinks{&coll, &buf};
        simulate(st, sinks);
        const auto set = coll.finalize(st.length, q, 0);

        // brute force: all radii, full sort with the same order
        struct Cand {
            double r;
            int64_t t;
        };
        std::vector<Cand> all;
        for (int64_t t = 0; t < st.length; ++t) {
            const double x[2] = {buf.data()[2 * t], buf.data()[2 * t + 1]};
            all.push_back({vs_norm(std::span<const double>(x, 2), fig1.profile.alpha), t});
        }
        std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) {
            if (a.r != b.r) return a.r > b.r;
            return a.t < b.t;
        });
        REQUIRE(set.records.size() == std::min<size_t>(target, all.size()));
        for (size_t k = 0; k < set.records.size(); ++k) {
            CHECK(set.records[k].t == all[k].t);
            CHECK(set.records[k].radius == all[k].r);
        }
        CHECK(set.threshold == all[set.records.size()].r);
    }
}

TEST_CASE("exceedance collector tie handling keeps earliest times") {
    ExceedanceCollector coll({1.0, 1.0}, 5, 0);
    std::vector<double> row0(100, 1.0), row1(100, 1.0);
    const double* rows[2] = {row0.data(), row1.data()};
    StateBlock blk{0, 100, 2, rows, true};
    coll.consume(blk);
    const auto set = coll.finalize(100, 0.95, 0);
    REQUIRE(set.records.size() == 5);
    for (int64_t k = 0; k < 5; ++k) CHECK(set.records[k].t == k);
}

TEST_CASE("exceedance merge is split-invariant") {
    const auto fig1 = figure_model(1);
    TrajectoryStream st;
    st.model = fig1.model;
    st.seed = 63;
    st.length = 30000;
    st.burn_in = 500;

    auto run_with_chunks = [&](int64_t cs, int workers) {
        TrajectoryStream alt = st;
        alt.chunk_size = cs;
        alt.workers = workers;
        ExceedanceCollector coll(fig1.profile.alpha, 40, 2);
        std::vector<Sink*> sinks{&coll};
        simulate(alt, sinks);
        return coll.finalize(alt.length, 1.0 - 40.0 / 30000.0, 0);
    };
    const auto a = run_with_chunks(30000, 1);
    const auto b = run_with_chunks(4096, 1);
    const auto c = run_with_chunks(7001, 4);
    REQUIRE(a.records.size() == b.records.size());
    REQUIRE(a.records.size() == c.records.size());
    for (size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].t == b.records[k].t);
        CHECK(a.records[k].t == c.records[k].t);
        CHECK(a.records[k].window == b.records[k].window);
        CHECK(a.records[k].window == c.records[k].window);
    }
}

TEST_CASE("general CCC with correlation 1 matches the degenerate model path-wise") {
    const std::vector<double> a{0.2, 0.1}, b{0.1, 0.1}, c{0.9, 0.54};
    const auto deg = build_ccc_degenerate(a, b, c);
    const auto gen = build_ccc_general(a, b, c, {1.0, 1.0, 1.0, 1.0});
    TrajectoryStream s1;
    s1.model = deg.model;
    s1.seed = 17;
    s1.length = 20000;
    s1.burn_in = 500;
    TrajectoryStream s2 = s1;
    s2.model = gen.model;
    const auto x1 = run_buffered(s1);
    const auto x2 = run_buffered(s2);
    CHECK(std::memcmp(x1.data(), x2.data(), x1.size() * sizeof(double)) == 0);
}

TEST_CASE("trajectory dump file format") {
    TrajectoryStream st;
    st.model = toy_pointmass_model(0.1, 1.0, 0.5, {1.0, 2.0});
    st.length = 1000;
    st.burn_in = 50;
    TrajectoryBufferSink buf(2, st.length);
    std::vector<Sink*> sinks{&buf};
    simulate(st, sinks);
    const std::string path = "/tmp/dsre_test_dump.bin";
    buf.write_file(path);
    FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    unsigned char header[32];
    REQUIRE(std::fread(header, 1, 32, f) == 32);
    CHECK(std::memcmp(header, "DSRE", 4) == 0);
    uint32_t version, d;
    uint64_t len;
    std::memcpy(&version, header + 4, 4);
    std::memcpy(&d, header + 8, 4);
    std::memcpy(&len, header + 12, 8);
    CHECK(version == 1);
    CHECK(d == 2);
    CHECK(len == 1000);
    std::fseek(f, 0, SEEK_END);
    CHECK(std::ftell(f) == 32 + 1000 * 2 * 8);
    std::fclose(f);
}
