#include "dsre/models/build.hpp"

#include <algorithm>
#include <cmath>

namespace dsre {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

void finish(BuiltModel& bm) {
    bm.model.case_kind = classify_case(bm.model.factors);
    bm.model.blocks = block_partition(bm.model, bm.profile);
}

void check_ccc_inputs(std::span<const double> a, std::span<const double> b,
                      std::span<const double> c) {
    if (a.size() != b.size() || b.size() != c.size() || a.empty()) {
        throw ConfigError("a, b, c must have equal positive length");
    }
    for (size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !(b[i] > 0.0) || !(c[i] > 0.0)) {
            throw ConfigError("CCC coefficients must be positive");
        }
    }
}

void check_ccc_ordering(const std::vector<AffineFactor>& factors,
                        const TailIndexProfile& profile) {
    const size_t d = factors.size();
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < d; ++j) {
            if (profile.alpha[i] > profile.alpha[j] + 1e-9) {
                // i lighter-tailed, j heavier: need c_j/c_i >= b_j/b_i
                if (factors[j].c / factors[i].c < factors[j].b / factors[i].b - 1e-12) {
                    throw CaseOrderingViolated(
                        "coordinates " + std::to_string(i) + "," + std::to_string(j) +
                        ": c_j/c_i < b_j/b_i although alpha_i > alpha_j");
                }
            }
        }
    }
}

} // namespace

BuiltModel build_bekk(std::span<const double> c, std::vector<double> sigma) {
    if (c.empty()) throw ConfigError("bekk: empty coefficient vector");
    const int d = static_cast<int>(c.size());
    for (int i = 0; i < d; ++i) {
        if (c[i] == 0.0) throw ConfigError("bekk: coefficients must be nonzero");
        const double bound = 2.0 * std::exp(kEulerGamma);
        if (!(c[i] * c[i] < bound)) {
            throw StationarityViolated("bekk coordinate " + std::to_string(i) + ": c^2 = " +
                                       std::to_string(c[i] * c[i]) + " >= 2 e^gamma = " +
                                       std::to_string(bound));
        }
    }
    BuiltModel bm;
    bm.model.d = d;
    const ScalarDist norm = ScalarDist::standard_normal();
    for (int i = 0; i < d; ++i) bm.model.factors.push_back({0.0, c[i], norm});
    GaussianVector g;
    g.chol = cholesky_psd(sigma, d);
    g.sigma = std::move(sigma);
    bm.model.q_law = std::move(g);
    bm.profile = solve_profile(bm.model.factors);
    finish(bm);
    return bm;
}

BuiltModel build_ccc_degenerate(std::span<const double> a, std::span<const double> b,
                                std::span<const double> c) {
    check_ccc_inputs(a, b, c);
    const int d = static_cast<int>(a.size());
    BuiltModel bm;
    bm.model.d = d;
    const ScalarDist chi = ScalarDist::chi_square_1();
    for (int i = 0; i < d; ++i) bm.model.factors.push_back({b[i], c[i], chi});
    for (int i = 0; i < d; ++i) {
        const double lm = log_moment(bm.model.factors[i]);
        if (!(lm < 0.0)) {
            throw StationarityViolated("ccc coordinate " + std::to_string(i) +
                                       ": E log(b+cZ^2) = " + std::to_string(lm) + " >= 0");
        }
    }
    bm.model.q_law = ConstantVector{std::vector<double>(a.begin(), a.end())};
    bm.profile = solve_profile(bm.model.factors);
    check_ccc_ordering(bm.model.factors, bm.profile);
    finish(bm);
    return bm;
}

BuiltModel build_ccc_general(std::span<const double> a, std::span<const double> b,
                             std::span<const double> c, std::vector<double> correlation) {
    BuiltModel bm = build_ccc_degenerate(a, b, c);
    const int d = bm.model.d;
    for (int i = 0; i < d; ++i) {
        if (std::fabs(correlation[i * d + i] - 1.0) > 1e-12) {
            throw ConfigError("correlation matrix must have unit diagonal");
        }
    }
    CorrelatedSquares cs;
    cs.chol = cholesky_psd(correlation, d);
    cs.corr = std::move(correlation);
    bm.model.innovation = std::move(cs);
    return bm;
}

BuiltModel build_generic(std::vector<AffineFactor> factors, QLaw q_law, bool force) {
    if (factors.empty()) throw ConfigError("empty factor list");
    BuiltModel bm;
    bm.model.d = static_cast<int>(factors.size());
    bm.model.factors = std::move(factors);
    bm.model.q_law = std::move(q_law);
    if (!force) {
        for (int i = 0; i < bm.model.d; ++i) {
            const double lm = log_moment(bm.model.factors[i]);
            if (!(lm < 0.0)) {
                throw StationarityViolated("coordinate " + std::to_string(i) +
                                           ": E log|b+cM| >= 0");
            }
        }
    }
    bm.profile = solve_profile(bm.model.factors);
    finish(bm);
    return bm;
}

BlockStructure block_partition(const DiagSREModel& model, const TailIndexProfile& profile) {
    const int d = model.d;
    BlockStructure bs;
    // group by exact coefficient equality
    std::vector<int> owner(d, -1);
    for (int i = 0; i < d; ++i) {
        if (owner[i] >= 0) continue;
        const int bl = static_cast<int>(bs.blocks.size());
        bs.blocks.push_back({i});
        owner[i] = bl;
        for (int j = i + 1; j < d; ++j) {
            if (owner[j] < 0 && model.factors[j].b == model.factors[i].b &&
                model.factors[j].c == model.factors[i].c) {
                bs.blocks[bl].push_back(j);
                owner[j] = bl;
            }
        }
    }
    // canonical order: alpha decreasing, then first coordinate
    std::stable_sort(bs.blocks.begin(), bs.blocks.end(),
                     [&](const std::vector<int>& x, const std::vector<int>& y) {
                         const double ax = profile.alpha[x.front()];
                         const double ay = profile.alpha[y.front()];
                         if (ax != ay) return ax > ay;
                         return x.front() < y.front();
                     });

    const size_t r = bs.blocks.size();
    bs.case_matrix.assign(r, std::vector<PairCase>(r, PairCase::Unsupported));
    const bool m_positive = model.m_law().nonnegative();
    for (size_t l = 0; l < r; ++l) {
        for (size_t k = 0; k < r; ++k) {
            if (l == k) continue;
            const auto& fi = model.factors[bs.blocks[l].front()];
            const auto& fj = model.factors[bs.blocks[k].front()];
            const double ai = profile.alpha[bs.blocks[l].front()];
            const double aj = profile.alpha[bs.blocks[k].front()];
            if (std::fabs(ai - aj) < 1e-9) continue; // distinct coefficients, equal index
            if (ai < aj) continue;                   // classified from the lighter side
            PairCase pc = PairCase::Unsupported;
            if (fi.b == 0.0 && fj.b == 0.0 && fj.c > fi.c && fi.c > 0.0) {
                pc = PairCase::CaseI;
            } else if (m_positive && fj.b >= fi.b && fi.b > 0.0 && fj.c > fi.c && fi.c > 0.0 &&
                       fj.c / fi.c >= fj.b / fi.b) {
                pc = PairCase::CaseII;
            }
            bs.case_matrix[l][k] = pc;
            bs.case_matrix[k][l] = pc;
            if (std::fabs(ai - aj) < 1e-3) bs.near_equal_alpha_warning = true;
        }
    }

    for (size_t l = 0; l < r; ++l) {
        BlockSupport sup;
        if (bs.blocks[l].size() == 1) {
            sup.kind = SupportKind::Axes;
        } else if (const auto* cq = std::get_if<ConstantVector>(&model.q_law)) {
            sup.kind = SupportKind::ConvexConeAtom;
            sup.atom.assign(d, 0.0);
            double qmax = 0.0;
            for (int i : bs.blocks[l]) qmax = std::max(qmax, cq->q[i]);
            for (int i : bs.blocks[l]) sup.atom[i] = cq->q[i] / qmax;
        } else {
            sup.kind = SupportKind::FullSphere;
        }
        bs.predicted_support.push_back(std::move(sup));
    }
    return bs;
}

BuiltModel figure_model(int which) {
    const double c2_bekk = std::pow(1.0 / 3.0, 0.25);
    const double c2_ccc = (-0.2 + std::sqrt(0.04 + 12.0 * 0.99)) / 6.0;
    const std::vector<double> rho09{1.0, 0.9, 0.9, 1.0};
    const std::vector<double> rho05{1.0, 0.5, 0.5, 1.0};
    const std::vector<double> a{0.2, 0.1};
    const std::vector<double> b{0.1, 0.1};
    switch (which) {
        case 1: return build_bekk(std::vector<double>{1.0, c2_bekk}, rho09);
        case 2: return build_bekk(std::vector<double>{1.0, 1.0}, rho09);
        case 3: return build_ccc_degenerate(a, b, std::vector<double>{0.9, c2_ccc});
        case 4: return build_ccc_degenerate(a, b, std::vector<double>{0.9, 0.9});
        case 5: return build_ccc_general(a, b, std::vector<double>{0.9, c2_ccc}, rho05);
        case 6: return build_ccc_general(a, b, std::vector<double>{0.9, 0.9}, rho05);
        default: throw ConfigError("figure index must be 1..6");
    }
}

} // namespace dsre
