#pragma once

#include "dsre/errors.hpp"

#include <span>
#include <vector>

namespace dsre {

// ||x||_alpha = max_i |x_i|^{alpha_i} = max-norm of x^alpha. Evaluated in
// log space so coordinates spanning many decades cannot overflow.
double vs_norm(std::span<const double> x, std::span<const double> alpha);

// log ||x||_alpha; -inf for the zero vector.
double vs_norm_log(std::span<const double> x, std::span<const double> alpha);

// (||x||_alpha^{-1/alpha_i} x_i)_i; max-norm of the result is 1.
std::vector<double> spectral_component(std::span<const double> x,
                                       std::span<const double> alpha);

// scale_i = ||x||_alpha^{-1/alpha_i}, the per-coordinate window scaling.
void spectral_scales(std::span<const double> x, std::span<const double> alpha,
                     double* scale_out);

// theta |-> (f_i * theta_i): one step of the spectral recursion under the
// diagonal factor values f_i = b_i + c_i m.
std::vector<double> spectral_pushforward(std::span<const double> theta,
                                         std::span<const double> factor_values);

} // namespace dsre
