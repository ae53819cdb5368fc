#ifndef RSJD_BUILTIN_MODELS_HPP
#define RSJD_BUILTIN_MODELS_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "rsjd/model.hpp"

namespace rsjd {

namespace detail {

inline double param_or(const std::map<std::string, double>& p, const std::string& key,
                       double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

// C^1 interpolation of the outward unit drift on [-1, 1]: s(+-1) = +-1.
inline double outward_unit_drift(double x) {
    if (x > 1.0) return 1.0;
    if (x < -1.0) return -1.0;
    return 0.5 * x * (3.0 - x * x);
}

// first absolute moment of |z|^{-1-alpha} over a <= |z| <= b (both signs)
inline double stable_abs_moment(double alpha, double a, double b) {
    if (alpha == 1.0) return 2.0 * std::log(b / a);
    return 2.0 * (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) / (1.0 - alpha);
}

inline Mat two_state_q() { return Mat{-1.0, 1.0, 1.0, -1.0}; }

}  // namespace detail

// Families used throughout the tests and the CLI. All are 1-d; parameter
// ranges are checked at construction.
//   ou-benchmark            b = -theta x, sigma = sqrt(2), no jumps, m = 1
//   example-5.1             inward linear drift + symmetric stable-like jumps
//   example-5.2             bounded inward drift + symmetric stable-like jumps
//   example-5.3-diffusion   outward unit drift, no jumps (transient)
//   example-5.3-stabilized  same drift + inward-biased jump kernel
inline ModelSpec builtin_model(const std::string& family,
                               const std::map<std::string, double>& params = {}) {
    using detail::param_or;
    ModelSpec spec;
    spec.name = family;
    spec.params = params;
    spec.dim = 1;

    auto require_alpha = [&](double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw std::invalid_argument("builtin_model: stable index alpha must be in (0, 2)");
    };

    // symmetric stable-like kernel c |z|^{-1-alpha} with matching envelope
    auto symmetric_stable = [&](double c, double alpha) {
        spec.jump_density = [c, alpha](const Vec&, int, const Vec& z) {
            const double r = std::abs(z[0]);
            return r <= 0.0 ? 0.0 : c * std::pow(r, -1.0 - alpha);
        };
        spec.jump_envelope = [c, alpha](const Vec& z, int) {
            const double r = std::abs(z[0]);
            return r <= 0.0 ? 0.0 : c * std::pow(r, -1.0 - alpha);
        };
        JumpAux aux;
        aux.compensator_mean = [](const Vec&, int, double) { return Vec{0.0}; };
        aux.small_cov = [c, alpha](const Vec&, int, double eps) {
            return Mat{2.0 * c * std::pow(eps, 2.0 - alpha) / (2.0 - alpha)};
        };
        spec.jump_aux = aux;
    };

    if (family == "ou-benchmark") {
        const double theta = param_or(params, "theta", 1.0);
        if (theta <= 0.0) throw std::invalid_argument("builtin_model: theta must be positive");
        spec.num_regimes = 1;
        spec.drift = [theta](const Vec& x, int) { return Vec{-theta * x[0]}; };
        spec.diffusion = [](const Vec&, int) { return Mat{std::sqrt(2.0)}; };
        spec.q_matrix = [](const Vec&) { return Mat{0.0}; };
        spec.q_bound = 0.0;
        return spec;
    }

    if (family == "example-5.1") {
        const double alpha = param_or(params, "alpha", 1.2);
        const double c = param_or(params, "c", 0.1);
        require_alpha(alpha);
        if (c < 0.0) throw std::invalid_argument("builtin_model: jump coefficient c must be >= 0");
        spec.num_regimes = 2;
        // drift strength per regime: criterion (b'x)/|x|^{2-delta} -> -inf
        spec.drift = [](const Vec& x, int i) { return Vec{-static_cast<double>(i) * x[0]}; };
        spec.diffusion = [](const Vec&, int) { return Mat{1.0}; };
        spec.q_matrix = [](const Vec&) { return detail::two_state_q(); };
        spec.q_bound = 1.0;
        symmetric_stable(c, alpha);
        return spec;
    }

    if (family == "example-5.2") {
        const double alpha = param_or(params, "alpha", 1.5);
        const double c = param_or(params, "c", 0.1);
        require_alpha(alpha);
        if (alpha <= 1.0)
            throw std::invalid_argument(
                "builtin_model: example-5.2 needs alpha > 1 (finite first jump moment)");
        spec.num_regimes = 2;
        // bounded inward drift, stronger in regime 2
        spec.drift = [](const Vec& x, int i) {
            return Vec{-(0.5 + 0.5 * i) * std::tanh(2.0 * x[0])};
        };
        spec.diffusion = [](const Vec&, int) { return Mat{1.0}; };
        spec.q_matrix = [](const Vec&) { return detail::two_state_q(); };
        spec.q_bound = 1.0;
        symmetric_stable(c, alpha);
        return spec;
    }

    if (family == "example-5.3-diffusion" || family == "example-5.3-stabilized") {
        spec.num_regimes = 2;
        spec.drift = [](const Vec& x, int) { return Vec{detail::outward_unit_drift(x[0])}; };
        spec.diffusion = [](const Vec&, int) { return Mat{1.0}; };
        spec.q_matrix = [](const Vec&) { return detail::two_state_q(); };
        spec.q_bound = 1.0;
        if (family == "example-5.3-stabilized") {
            const double alpha = param_or(params, "alpha", 1.5);
            const double c0 = param_or(params, "c0", 1.2);
            const double c1 = param_or(params, "c1", 1.0);
            require_alpha(alpha);
            if (alpha <= 1.0)
                throw std::invalid_argument("builtin_model: stabilized family needs alpha > 1");
            if (!(c0 >= c1 && c1 > 0.0))
                throw std::invalid_argument("builtin_model: need c0 >= c1 > 0");
            if (!(c1 > 0.5 * (alpha - 1.0)))
                throw std::invalid_argument(
                    "builtin_model: need c1 > (alpha-1)/2 for the stabilization criterion");
            // Asymmetric kernel: for x > 0 mass is tilted to z < 0 and vice
            // versa, so large jumps pull towards the origin.
            spec.jump_density = [alpha, c0, c1](const Vec& x, int, const Vec& z) {
                const double r = std::abs(z[0]);
                if (r <= 0.0) return 0.0;
                const double tilt = c0 - c1 * std::tanh(x[0]) * sgn(z[0]);
                return tilt * std::pow(r, -1.0 - alpha);
            };
            spec.jump_envelope = [alpha, c0, c1](const Vec& z, int) {
                const double r = std::abs(z[0]);
                return r <= 0.0 ? 0.0 : (c0 + c1) * std::pow(r, -1.0 - alpha);
            };
            JumpAux aux;
            aux.compensator_mean = [alpha, c1](const Vec& x, int, double eps) {
                // odd part: -c1 tanh(x) * int_{eps<=|z|<1} |z| |z|^{-1-alpha} dz
                return Vec{-c1 * std::tanh(x[0]) * detail::stable_abs_moment(alpha, eps, 1.0)};
            };
            aux.small_cov = [alpha, c0](const Vec&, int, double eps) {
                return Mat{2.0 * c0 * std::pow(eps, 2.0 - alpha) / (2.0 - alpha)};
            };
            spec.jump_aux = aux;
        }
        return spec;
    }

    throw std::invalid_argument("builtin_model: unknown family '" + family + "'");
}

}  // namespace rsjd

#endif
