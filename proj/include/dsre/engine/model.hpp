#pragma once

#include "dsre/dist/scalar_dist.hpp"

#include <string>
#include <variant>
#include <vector>

namespace dsre {

// Q ~ N(0, Sigma); chol is the (PSD-tolerant) lower Cholesky factor.
struct GaussianVector {
    std::vector<double> sigma; // d x d row-major
    std::vector<double> chol;  // d x d row-major lower triangular
};
struct ConstantVector {
    std::vector<double> q;
};
struct IndependentMarginals {
    std::vector<ScalarDist> dists;
};
using QLaw = std::variant<GaussianVector, ConstantVector, IndependentMarginals>;

enum class CaseKind { CaseI, CaseII, Mixed, EqualCoefficients };

enum class SupportKind { FullSphere, ConvexConeAtom, Axes };
struct BlockSupport {
    SupportKind kind = SupportKind::Axes;
    std::vector<double> atom; // direction for ConvexConeAtom, dim d
};

enum class PairCase { CaseI, CaseII, Unsupported };

struct BlockStructure {
    std::vector<std::vector<int>> blocks;            // ordered by decreasing alpha
    std::vector<std::vector<PairCase>> case_matrix;  // r x r, diagonal unused
    std::vector<BlockSupport> predicted_support;
    bool near_equal_alpha_warning = false;
};

// Innovation wiring. SharedInnovation: one scalar M_t multiplies every
// coordinate (the diagonal SRE proper). CorrelatedSquares: coordinate i gets
// b_i + c_i * N_i^2 with N a correlated standard Gaussian vector (the
// general CCC volatility recursion, which leaves the single-M class).
struct SharedInnovation {};
struct CorrelatedSquares {
    std::vector<double> corr; // d x d correlation matrix of N
    std::vector<double> chol;
};
using Innovation = std::variant<SharedInnovation, CorrelatedSquares>;

struct DiagSREModel {
    int d = 0;
    std::vector<AffineFactor> factors; // one per coordinate, shared M law
    QLaw q_law = ConstantVector{};
    Innovation innovation = SharedInnovation{};
    BlockStructure blocks;
    CaseKind case_kind = CaseKind::Mixed;

    const ScalarDist& m_law() const { return factors.at(0).dist; }
    bool shared_m() const { return std::holds_alternative<SharedInnovation>(innovation); }

    // canonical text form, used for the manifest hash
    std::string describe() const;
};

// Lower Cholesky factor accepting singular PSD input (zero pivots allowed).
std::vector<double> cholesky_psd(const std::vector<double>& a, int d);

CaseKind classify_case(const std::vector<AffineFactor>& factors);

} // namespace dsre
