#include "dsre/diag/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace dsre {

double hill_estimator(std::span<const double> top_desc, size_t k) {
    if (k == 0 || k + 1 > top_desc.size()) {
        throw Error("hill: need k+1 order statistics, have " +
                    std::to_string(top_desc.size()));
    }
    const double xk1 = top_desc[k];
    if (!(xk1 > 0.0)) throw DegenerateSample("hill: nonpositive threshold statistic");
    double denom = 0.0;
    for (size_t j = 0; j < k; ++j) denom += std::log(top_desc[j] / xk1);
    if (denom <= 0.0) throw DegenerateSample("hill: all top statistics equal");
    return static_cast<double>(k) / denom;
}

double estimate_tail_constant(std::span<const double> top_desc, int64_t n, double alpha,
                              double p) {
    const auto k = static_cast<size_t>(
        std::max<double>(1.0, std::floor(static_cast<double>(n) * p)));
    if (k >= top_desc.size()) throw Error("tail constant: not enough order statistics");
    const double u = top_desc[k];
    if (!(u > 0.0)) throw DegenerateSample("tail constant: nonpositive quantile");
    return std::pow(u, alpha) * (static_cast<double>(k) / static_cast<double>(n));
}

namespace {

// count records above tau among pairs sorted by .v descending
int64_t count_above(const std::vector<PairRecord>& sorted_desc, double tau) {
    int64_t c = 0;
    for (const auto& r : sorted_desc) {
        if (r.v > tau) {
            ++c;
        } else {
            break;
        }
    }
    return c;
}

int64_t count_joint(const std::vector<PairRecord>& sorted_desc, double tau_v,
                    double tau_other) {
    int64_t c = 0;
    for (const auto& r : sorted_desc) {
        if (!(r.v > tau_v)) break;
        if (r.other > tau_other) ++c;
    }
    return c;
}

} // namespace

std::vector<JointCurvePoint> joint_exceedance_curve(const JointPairsSink& sink, int64_t n,
                                                    std::span<const double> grid) {
    const auto by_i = sink.sorted_by_i();
    const auto by_j = sink.sorted_by_j();
    std::vector<JointCurvePoint> out;
    for (const double q : grid) {
        if (!(q > 0.0 && q < 1.0)) throw ConfigError("grid quantiles must be in (0,1)");
        const auto k = static_cast<size_t>(
            std::ceil(static_cast<double>(n) * (1.0 - q)));
        JointCurvePoint pt;
        pt.quantile = q;
        pt.u = 1.0 / (1.0 - q);
        if (k + 1 > by_i.size() || k + 1 > by_j.size()) {
            throw InsufficientExceedances("joint curve: quantile " + std::to_string(q) +
                                          " needs more records than collected");
        }
        pt.tau_i = by_i[k].v;
        pt.tau_j = by_j[k].v;
        pt.count_i = count_above(by_i, pt.tau_i);
        pt.count_j = count_above(by_j, pt.tau_j);
        pt.count_joint = count_joint(by_i, pt.tau_i, pt.tau_j);
        pt.joint_scaled =
            pt.u * static_cast<double>(pt.count_joint) / static_cast<double>(n);
        pt.conditional = pt.count_i > 0 ? static_cast<double>(pt.count_joint) /
                                              static_cast<double>(pt.count_i)
                                        : 0.0;
        out.push_back(pt);
    }
    return out;
}

TiltedDriftPair tilted_drift(const AffineFactor& f1, const AffineFactor& fj, double alpha_1,
                             double alpha_j, size_t mc_draws, uint64_t seed) {
    const double norm = abs_moment(f1, alpha_1);
    if (std::fabs(norm - 1.0) > 1e-6) {
        throw TiltNotNormalized("tilted_drift: E|b1+c1M|^a1 = " + std::to_string(norm));
    }
    TiltedDriftPair out;
    out.mu_1_given_1 = tilted_cross_moment(f1, alpha_1, f1);
    out.mu_j_given_1 = tilted_cross_moment(f1, alpha_1, fj);
    out.jensen_gap = alpha_j * out.mu_j_given_1 - alpha_1 * out.mu_1_given_1;

    const TiltedSampler sampler(f1, alpha_1);
    CounterStream stream(seed, static_cast<uint32_t>(simd::StreamTag::Aux), 777);
    double sum = 0.0, sumsq = 0.0;
    for (size_t i = 0; i < mc_draws; ++i) {
        const double m = sampler.sample(stream);
        const double g = alpha_j * std::log(std::fabs(fj.b + fj.c * m)) -
                         alpha_1 * std::log(std::fabs(f1.b + f1.c * m));
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / static_cast<double>(mc_draws);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(mc_draws) - mean * mean);
    out.mc_gap = mean;
    out.ci_halfwidth = 2.576 * std::sqrt(var / static_cast<double>(mc_draws));
    return out;
}

StationarityReport stationarity_check(const DiagSREModel& model) {
    constexpr double kEulerGamma = 0.57721566490153286;
    StationarityReport rep;
    for (const auto& f : model.factors) {
        StationarityRow row;
        row.log_moment = log_moment(f);
        row.pass = row.log_moment < 0.0;
        if (f.b == 0.0 && f.dist.kind() == DistKind::StandardNormal) {
            row.has_closed_form = true;
            row.c_squared = f.c * f.c;
            row.bound = 2.0 * std::exp(kEulerGamma);
            row.pass_closed_form = row.c_squared < row.bound;
            row.criteria_agree = row.pass == row.pass_closed_form;
        }
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error("ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, size_t n, size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) /
                      static_cast<double>(n + m);
    const double lambda = std::sqrt(ne) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace dsre
