#include "dsre/vsrv/norms.hpp"

#include <cmath>
#include <limits>

namespace dsre {

double vs_norm_log(std::span<const double> x, std::span<const double> alpha) {
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < x.size(); ++i) {
        const double a = std::fabs(x[i]);
        if (a > 0.0) best = std::max(best, alpha[i] * std::log(a));
    }
    return best;
}

double vs_norm(std::span<const double> x, std::span<const double> alpha) {
    const double l = vs_norm_log(x, alpha);
    return std::isinf(l) && l < 0.0 ? 0.0 : std::exp(l);
}

void spectral_scales(std::span<const double> x, std::span<const double> alpha,
                     double* scale_out) {
    const double l = vs_norm_log(x, alpha);
    for (size_t i = 0; i < x.size(); ++i) scale_out[i] = std::exp(-l / alpha[i]);
}

std::vector<double> spectral_component(std::span<const double> x,
                                       std::span<const double> alpha) {
    const double l = vs_norm_log(x, alpha);
    if (std::isinf(l) && l < 0.0) throw ZeroVector("spectral component of the zero vector");
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * std::exp(-l / alpha[i]);
    return out;
}

std::vector<double> spectral_pushforward(std::span<const double> theta,
                                         std::span<const double> factor_values) {
    std::vector<double> out(theta.size());
    for (size_t i = 0; i < theta.size(); ++i) out[i] = factor_values[i] * theta[i];
    return out;
}

} // namespace dsre
