#include "dsre/diag/diagnostics.hpp"

#include <cmath>

namespace dsre {

FirstPassageStats first_passage(const AffineFactor& f1, double alpha_1,
                                const ScalarDist& q_marginal, double u, size_t replicas,
                                double window_c, uint64_t seed) {
    if (!(std::log(std::log(u)) > 0.0)) {
        throw Error("first_passage: need log log u > 0");
    }
    const TiltedSampler sampler(f1, alpha_1);
    // normalized drift; the divisor is 1 up to quadrature error except for
    // point-mass factors, whose tilt is the identity
    const double mu11 = tilted_cross_moment(f1, alpha_1, f1) / abs_moment(f1, alpha_1);

    FirstPassageStats out;
    out.u = u;
    out.threshold = std::pow(u, 1.0 / alpha_1);
    out.typical = std::log(u) / (mu11 * alpha_1);
    out.f_u = std::sqrt(std::log(u) * std::log(std::log(u)));
    out.window_c = window_c;

    constexpr int64_t kCap = 1000000;
    size_t violations = 0;
    for (size_t r = 0; r < replicas; ++r) {
        CounterStream stream(seed, static_cast<uint32_t>(simd::StreamTag::Replica),
                             static_cast<int64_t>(r));
        double x = 0.0;      // backward partial sum of the first marginal
        double s = 0.0;      // running sum of W_l = log|b1 + c1 M_l|
        int64_t t = 0;
        for (;;) {
            ++t;
            if (t > kCap) {
                throw PassageTimeout("first passage exceeded " + std::to_string(kCap) +
                                     " steps; tilt appears misconfigured");
            }
            const double q = std::fabs(q_marginal.sample(stream));
            x += std::exp(s) * q;
            const double m = sampler.sample(stream);
            s += std::log(std::fabs(f1.b + f1.c * m));
            if (x > out.threshold) break;
        }
        out.t_samples.push_back(t);
        out.s_samples.push_back(s);
        if (std::fabs(static_cast<double>(t) - out.typical) >= window_c * out.f_u) {
            ++violations;
        }
    }
    out.window_violation_rate =
        static_cast<double>(violations) / static_cast<double>(replicas);
    return out;
}

} // namespace dsre
