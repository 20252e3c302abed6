#pragma once

#include "dsre/dist/scalar_dist.hpp"
#include "dsre/engine/sinks.hpp"
#include "dsre/tail/solver.hpp"

#include <span>
#include <vector>

namespace dsre {

// k / sum_{j<=k} log(x_(j)/x_(k+1)) from order statistics sorted largest
// first. Throws DegenerateSample when the denominator vanishes.
double hill_estimator(std::span<const double> top_desc, size_t k);

// a_hat = u^alpha * P(X > u) with u the empirical (1-p)-quantile, taken from
// the same top order statistics.
double estimate_tail_constant(std::span<const double> top_desc, int64_t n, double alpha,
                              double p = 1e-4);

struct JointCurvePoint {
    double quantile = 0.0;
    double u = 0.0;            // 1/(1-q)
    double tau_i = 0.0, tau_j = 0.0;
    double joint_scaled = 0.0; // u * P(both exceed)
    double conditional = 0.0;  // P(X_j > tau_j | X_i > tau_i)
    int64_t count_joint = 0, count_i = 0, count_j = 0;
};

// Thresholds are the marginal empirical quantiles (the limit statement's u
// parameterization up to the unknown tail constants).
std::vector<JointCurvePoint> joint_exceedance_curve(const JointPairsSink& sink, int64_t n,
                                                    std::span<const double> grid);

struct TiltedDriftPair {
    double mu_1_given_1 = 0.0; // E[log(b1+c1 M) (b1+c1 M)^a1], > 0
    double mu_j_given_1 = 0.0; // E[log(bj+cj M) (b1+c1 M)^a1]
    double jensen_gap = 0.0;   // a_j mu_{j|1} - a_1 mu_{1|1}, quadrature
    double mc_gap = 0.0;       // tilted Monte Carlo estimate of the same
    double ci_halfwidth = 0.0; // 99% CI halfwidth of mc_gap
};

TiltedDriftPair tilted_drift(const AffineFactor& f1, const AffineFactor& fj, double alpha_1,
                             double alpha_j, size_t mc_draws = 200000, uint64_t seed = 1);

struct FirstPassageStats {
    double u = 0.0;
    double threshold = 0.0;           // u^{1/alpha_1}
    double typical = 0.0;             // log u / (mu_{1|1} alpha_1)
    double f_u = 0.0;                 // sqrt(log u * log log u)
    double window_c = 0.0;
    std::vector<int64_t> t_samples;   // T_u per replica
    std::vector<double> s_samples;    // S_{T_u}
    double window_violation_rate = 0.0;
};

// Backward partial sums of the first marginal under the tilted M law, run
// to first passage above u^{1/alpha_1}. Factors and Q are taken in absolute
// value (the positive envelope the passage analysis lives on).
FirstPassageStats first_passage(const AffineFactor& f1, double alpha_1,
                                const ScalarDist& q_marginal, double u, size_t replicas,
                                double window_c = 2.0, uint64_t seed = 1);

struct StationarityRow {
    double log_moment = 0.0;
    bool pass = false;          // E log|b+cM| < 0
    bool has_closed_form = false;
    double c_squared = 0.0;
    double bound = 0.0;         // 2 e^gamma
    bool pass_closed_form = false;
    bool criteria_agree = true;
};

struct StationarityReport {
    std::vector<StationarityRow> rows;
    bool all_pass = true;
};

StationarityReport stationarity_check(const DiagSREModel& model);

// Two-sample Kolmogorov-Smirnov.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_pvalue(double d, size_t n, size_t m);

} // namespace dsre
