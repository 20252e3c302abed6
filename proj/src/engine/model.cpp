#include "dsre/engine/model.hpp"

#include <cmath>
#include <cstdio>

namespace dsre {

std::vector<double> cholesky_psd(const std::vector<double>& a, int d) {
    if (static_cast<int>(a.size()) != d * d) throw ConfigError("covariance size != d*d");
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
            if (std::fabs(a[i * d + j] - a[j * d + i]) > 1e-12) {
                throw ConfigError("covariance not symmetric");
            }
        }
    }
    std::vector<double> l(d * d, 0.0);
    const double tol = 1e-10;
    for (int j = 0; j < d; ++j) {
        double s = a[j * d + j];
        for (int k = 0; k < j; ++k) s -= l[j * d + k] * l[j * d + k];
        if (s < -tol) throw ConfigError("covariance not positive semidefinite");
        const double piv = std::sqrt(std::max(s, 0.0));
        l[j * d + j] = piv;
        for (int i = j + 1; i < d; ++i) {
            double v = a[i * d + j];
            for (int k = 0; k < j; ++k) v -= l[i * d + k] * l[j * d + k];
            if (piv > tol) {
                l[i * d + j] = v / piv;
            } else {
                if (std::fabs(v) > 1e-8) throw ConfigError("covariance not positive semidefinite");
                l[i * d + j] = 0.0;
            }
        }
    }
    return l;
}

CaseKind classify_case(const std::vector<AffineFactor>& factors) {
    bool all_equal = true;
    bool all_b_zero = true;
    bool all_b_pos = true;
    for (const auto& f : factors) {
        if (f.b != factors[0].b || f.c != factors[0].c) all_equal = false;
        if (f.b != 0.0) all_b_zero = false;
        if (!(f.b > 0.0)) all_b_pos = false;
    }
    if (all_equal) return CaseKind::EqualCoefficients;
    if (all_b_zero) return CaseKind::CaseI;
    if (all_b_pos && factors[0].dist.nonnegative()) return CaseKind::CaseII;
    return CaseKind::Mixed;
}

namespace {

void append_num(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g,", v);
    s += buf;
}

void append_dist(std::string& s, const ScalarDist& d) {
    switch (d.kind()) {
        case DistKind::StandardNormal: s += "normal;"; break;
        case DistKind::ChiSquare1: s += "chisq1;"; break;
        case DistKind::PointMass:
            s += "pointmass:";
            append_num(s, d.point());
            s += ";";
            break;
        case DistKind::TabulatedPositive:
            s += "tabulated:";
            for (const auto& [x, rho] : d.grid()) {
                append_num(s, x);
                append_num(s, rho);
            }
            s += ";";
            break;
    }
}

} // namespace

std::string DiagSREModel::describe() const {
    std::string s = "d=" + std::to_string(d) + ";b=";
    for (const auto& f : factors) append_num(s, f.b);
    s += ";c=";
    for (const auto& f : factors) append_num(s, f.c);
    s += ";m=";
    append_dist(s, m_law());
    s += "q=";
    if (const auto* g = std::get_if<GaussianVector>(&q_law)) {
        s += "gaussian:";
        for (double v : g->sigma) append_num(s, v);
    } else if (const auto* cq = std::get_if<ConstantVector>(&q_law)) {
        s += "constant:";
        for (double v : cq->q) append_num(s, v);
    } else {
        s += "independent:";
        for (const auto& dst : std::get<IndependentMarginals>(q_law).dists) append_dist(s, dst);
    }
    s += ";innov=";
    if (const auto* cs = std::get_if<CorrelatedSquares>(&innovation)) {
        s += "corrsq:";
        for (double v : cs->corr) append_num(s, v);
    } else {
        s += "shared";
    }
    return s;
}

} // namespace dsre
