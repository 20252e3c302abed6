#pragma once

#include "dsre/engine/model.hpp"
#include "dsre/tail/solver.hpp"

#include <span>

namespace dsre {

struct BuiltModel {
    DiagSREModel model;
    TailIndexProfile profile;
};

// Diagonal BEKK-ARCH(1): M ~ N(0,1), b = 0, Q ~ N(0, sigma). Gated on the
// closed-form top-Lyapunov condition c_i^2 < 2 e^gamma.
BuiltModel build_bekk(std::span<const double> c, std::vector<double> sigma);

// Degenerate CCC-GARCH(1,1) volatility process: M = Z^2, Q = a constant.
// Gated on E log(b_i + c_i Z^2) < 0 and the cross-block ordering
// c_j/c_i >= b_j/b_i whenever alpha_i > alpha_j.
BuiltModel build_ccc_degenerate(std::span<const double> a, std::span<const double> b,
                                std::span<const double> c);

// General CCC volatility recursion with per-coordinate innovations N_i^2,
// N ~ N(0, correlation). Marginal alphas still solve the chi-square Kesten
// equations; no joint theorem backs this model (conjecture experiments).
BuiltModel build_ccc_general(std::span<const double> a, std::span<const double> b,
                             std::span<const double> c, std::vector<double> correlation);

// Any diagonal SRE from parts; gates stationarity unless force.
BuiltModel build_generic(std::vector<AffineFactor> factors, QLaw q_law, bool force = false);

// Groups coordinates by exact (b, c) equality, orders blocks by decreasing
// alpha, classifies cross-block pairs, and predicts per-block spectral
// support.
BlockStructure block_partition(const DiagSREModel& model, const TailIndexProfile& profile);

// The six simulation-study configurations (1..6).
BuiltModel figure_model(int which);

} // namespace dsre
