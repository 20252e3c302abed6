#pragma once

#include "dsre/dist/scalar_dist.hpp"
#include "dsre/engine/model.hpp"

#include <string>
#include <vector>

namespace dsre {

struct TailIndexProfile {
    std::vector<double> alpha;      // per-coordinate tail index
    std::vector<double> residual;   // |E|b+cM|^alpha - 1|
    std::vector<double> log_moment; // E log|b+cM|, all < 0
};

// The unique positive root of E|b+cM|^s = 1. Expands an upper bracket
// geometrically from s=1, then a bisection/secant hybrid; the secant step
// is taken only when it lands strictly inside the bracket.
double solve_alpha(const AffineFactor& factor, double max_alpha = 64.0);

TailIndexProfile solve_profile(const std::vector<AffineFactor>& factors,
                               double max_alpha = 64.0);

enum class Verdict { Pass, Fail, Assumed, NotVerifiable };
const char* verdict_name(Verdict v);

struct AssumptionReport {
    Verdict a1 = Verdict::Pass;
    Verdict a2 = Verdict::Pass;
    Verdict a3 = Verdict::Pass;
    Verdict a4 = Verdict::Pass;
    Verdict a5 = Verdict::Pass;
    Verdict a6 = Verdict::Pass;
    std::vector<std::string> notes;

    bool all_ok() const {
        auto ok = [](Verdict v) { return v == Verdict::Pass || v == Verdict::Assumed; };
        return ok(a1) && ok(a2) && ok(a3) && ok(a4) && ok(a5) && ok(a6);
    }
};

AssumptionReport validate_assumptions(const DiagSREModel& model,
                                      const TailIndexProfile& profile);

} // namespace dsre
