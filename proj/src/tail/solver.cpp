#include "dsre/tail/solver.hpp"

#include <algorithm>
#include <cmath>

namespace dsre {

double solve_alpha(const AffineFactor& factor, double max_alpha) {
    const double lm = log_moment(factor);
    if (!(lm < 0.0)) {
        throw StationarityViolated("E log|b+cM| = " + std::to_string(lm) + " >= 0");
    }
    auto g = [&](double s) { return abs_moment(factor, s) - 1.0; };

    // bracket: need lo with g<0 and hi with g>0
    double hi = 1.0;
    double ghi = g(hi);
    double lo, glo;
    if (ghi > 0.0) {
        lo = 0.5;
        glo = g(lo);
        while (glo > 0.0) {
            hi = lo;
            ghi = glo;
            lo *= 0.5;
            if (lo < 0x1p-30) throw NoRootInRange("m(s) never dips below 1 for s > 0");
            glo = g(lo);
        }
    } else {
        lo = hi;
        glo = ghi;
        while (ghi <= 0.0) {
            lo = hi;
            glo = ghi;
            hi *= 2.0;
            if (hi > max_alpha) {
                throw NoRootInRange("E|b+cM|^s stays <= 1 up to max_alpha = " +
                                    std::to_string(max_alpha));
            }
            ghi = g(hi);
        }
    }
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;

    // hybrid: secant when the step stays inside the bracket, else bisection;
    // iterate past the residual target until the bracket itself collapses
    double best = 0.5 * (lo + hi);
    double gbest = g(best);
    for (int it = 0; it < 200; ++it) {
        if (gbest == 0.0) return best;
        if (gbest < 0.0) {
            lo = best;
            glo = gbest;
        } else {
            hi = best;
            ghi = gbest;
        }
        if (std::fabs(gbest) <= 1e-9 && (hi - lo) <= 1e-11 * std::max(1.0, hi)) break;
        double next = lo - glo * (hi - lo) / (ghi - glo);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == lo || next == hi) break; // double resolution reached
        best = next;
        gbest = g(best);
    }
    return std::fabs(glo) <= std::fabs(ghi) ? lo : hi;
}

TailIndexProfile solve_profile(const std::vector<AffineFactor>& factors, double max_alpha) {
    TailIndexProfile p;
    for (const auto& f : factors) {
        const double a = solve_alpha(f, max_alpha);
        p.alpha.push_back(a);
        p.residual.push_back(std::fabs(abs_moment(f, a) - 1.0));
        p.log_moment.push_back(log_moment(f));
    }
    return p;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Assumed: return "assumed";
        case Verdict::NotVerifiable: return "not verifiable numerically";
    }
    return "?";
}

AssumptionReport validate_assumptions(const DiagSREModel& model,
                                      const TailIndexProfile& profile) {
    AssumptionReport r;
    const int d = model.d;

    for (int i = 0; i < d; ++i) {
        if (!(profile.log_moment[i] < 0.0)) {
            r.a1 = Verdict::Fail;
            r.notes.push_back("A1: coordinate " + std::to_string(i) +
                              " has E log|b+cM| = " + std::to_string(profile.log_moment[i]));
        }
        if (!(profile.residual[i] <= 1e-9)) {
            r.a2 = Verdict::Fail;
            r.notes.push_back("A2: coordinate " + std::to_string(i) + " residual " +
                              std::to_string(profile.residual[i]));
        }
    }

    // A3: moment probe slightly above the largest index
    const double amax = *std::max_element(profile.alpha.begin(), profile.alpha.end());
    for (int i = 0; i < d; ++i) {
        try {
            const double v = abs_moment(model.factors[i], amax + 0.5);
            if (!std::isfinite(v)) throw NonIntegrable("inf");
        } catch (const NonIntegrable&) {
            r.a3 = Verdict::Fail;
            r.notes.push_back("A3: coordinate " + std::to_string(i) +
                              " moment diverges at alpha_max + 0.5");
        }
    }

    switch (model.m_law().kind()) {
        case DistKind::StandardNormal:
        case DistKind::ChiSquare1:
            r.a4 = Verdict::Pass; // continuous law, non-arithmetic
            break;
        case DistKind::TabulatedPositive:
            r.a4 = Verdict::Assumed; // cannot be decided from a finite grid
            r.notes.push_back("A4: non-arithmeticity assumed for tabulated law");
            break;
        case DistKind::PointMass:
            r.a4 = Verdict::Fail;
            r.notes.push_back("A4: point-mass M is arithmetic");
            break;
    }

    const bool m_degenerate = model.m_law().kind() == DistKind::PointMass;
    if (const auto* g = std::get_if<GaussianVector>(&model.q_law)) {
        for (int i = 0; i < d; ++i) {
            if (!(g->sigma[i * d + i] > 0.0)) {
                r.a5 = Verdict::Fail;
                r.notes.push_back("A5: Q marginal " + std::to_string(i) + " degenerate at 0");
            }
        }
        r.a6 = Verdict::Pass; // Gaussian ratios are Cauchy-tailed
    } else if (const auto* cq = std::get_if<ConstantVector>(&model.q_law)) {
        for (int i = 0; i < d; ++i) {
            if (!(cq->q[i] > 0.0)) {
                r.a5 = Verdict::Fail;
                r.notes.push_back("A5: constant Q coordinate " + std::to_string(i) +
                                  " is not positive");
            }
        }
        if (m_degenerate) {
            r.a5 = Verdict::Fail;
            r.notes.push_back("A5: point-mass M with constant Q gives a degenerate chain");
        }
        r.a6 = Verdict::Pass; // constant ratios
    } else {
        r.a5 = Verdict::NotVerifiable;
        r.a6 = Verdict::NotVerifiable;
        r.notes.push_back("A5/A6: custom Q law, not verifiable numerically");
    }

    bool distinct = false;
    for (int i = 0; i < d && !distinct; ++i) {
        for (int j = 0; j < d; ++j) {
            if (std::fabs(profile.alpha[i] - profile.alpha[j]) > 1e-9) {
                distinct = true;
                break;
            }
        }
    }
    if (!distinct && r.a6 == Verdict::Pass) r.a6 = Verdict::Pass; // vacuous

    return r;
}

} // namespace dsre
