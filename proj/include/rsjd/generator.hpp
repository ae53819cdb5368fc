#ifndef RSJD_GENERATOR_HPP
#define RSJD_GENERATOR_HPP

#include <cmath>
#include <string>
#include <vector>

#include "rsjd/common.hpp"
#include "rsjd/model.hpp"
#include "rsjd/quadrature.hpp"
#include "rsjd/test_function.hpp"

namespace rsjd {

struct QuadratureConfig {
    double small_jump_radius = 1.0;  // split point of the compensated integral
    double outer_radius = 1e3;       // truncation R of the large-jump integral
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;
    int angular_order = 16;  // angles in d=2; half the product-rule order in d=3

    void check() const {
        if (!(small_jump_radius > 0.0 && small_jump_radius <= 1.0))
            throw GeneratorError("QuadratureConfig: small_jump_radius must be in (0, 1]");
        if (outer_radius <= small_jump_radius)
            throw GeneratorError("QuadratureConfig: outer_radius must exceed the split point");
        if (rel_tol <= 0.0) throw GeneratorError("QuadratureConfig: rel_tol must be positive");
    }
};

struct NonlocalResult {
    double value = 0.0;
    double error_bound = 0.0;  // accumulated quadrature error estimate
    double tail_bound = 0.0;   // bound on the neglected |z| > R contribution
};

namespace detail {

// Angular rule: unit directions u_k with weights w_k such that
// int_{S^{d-1}} g(u) dS ~ sum w_k g(u_k).
struct AngularRule {
    std::vector<Vec> dirs;
    std::vector<double> weights;
};

// 8-point Gauss-Legendre on [-1, 1] for the polar angle in d = 3
inline constexpr double kGl8Nodes[8] = {-0.9602898564975363, -0.7966664774136267,
                                        -0.5255324099163290, -0.1834346424956498,
                                        0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
inline constexpr double kGl8Weights[8] = {0.1012285362903763, 0.2223810344533745,
                                          0.3137066458778873, 0.3626837833783620,
                                          0.3626837833783620, 0.3137066458778873,
                                          0.2223810344533745, 0.1012285362903763};

inline AngularRule angular_rule(int dim, int order) {
    AngularRule rule;
    if (dim == 1) {
        rule.dirs = {Vec{1.0}, Vec{-1.0}};
        rule.weights = {1.0, 1.0};
    } else if (dim == 2) {
        const int n = std::max(4, order);
        for (int k = 0; k < n; ++k) {
            const double th = 6.283185307179586 * (k + 0.5) / n;
            rule.dirs.push_back(Vec{std::cos(th), std::sin(th)});
            rule.weights.push_back(6.283185307179586 / n);
        }
    } else if (dim == 3) {
        const int nphi = std::max(8, order);
        for (int a = 0; a < 8; ++a) {
            const double mu = kGl8Nodes[a], smu = std::sqrt(1.0 - mu * mu);
            for (int k = 0; k < nphi; ++k) {
                const double phi = 6.283185307179586 * (k + 0.5) / nphi;
                rule.dirs.push_back(Vec{smu * std::cos(phi), smu * std::sin(phi), mu});
                rule.weights.push_back(kGl8Weights[a] * 6.283185307179586 / nphi);
            }
        }
    } else {
        throw GeneratorError("quadrature supports d <= 3 only");
    }
    return rule;
}

// Quasi-uniform directions for grid evaluation (not an integration rule).
inline std::vector<Vec> sphere_directions(int dim, int count) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        dirs = {Vec{1.0}, Vec{-1.0}};
    } else if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            const double th = 6.283185307179586 * k / count;
            dirs.push_back(Vec{std::cos(th), std::sin(th)});
        }
    } else if (dim == 3) {
        // Fibonacci sphere
        const double ga = 2.399963229728653;
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            dirs.push_back(Vec{r * std::cos(ga * k), r * std::sin(ga * k), z});
        }
    } else {
        throw GeneratorError("sphere_directions supports d <= 3 only");
    }
    return dirs;
}

}  // namespace detail

// (1/2) tr[a grad^2 f] + b . grad f
inline double local_term(const ModelSpec& spec, const TestFunction& f, const Vec& x, int i) {
    const Mat a = spec.a_matrix(x, i);
    const Vec b = spec.drift(x, i);
    const Vec g = f.gradient(x, i);
    const Mat h = f.hessian(x, i);
    if (!all_finite(b) || !all_finite(a))
        throw GeneratorError("local_term: non-finite coefficient at " + format_point(x, i));
    if (!all_finite(g) || !all_finite(h))
        throw GeneratorError("local_term: non-finite derivative at " + format_point(x, i));
    return 0.5 * trace_prod(a, h, spec.dim) + dot(b, g);
}

// sum_j q_ij(x) f(x, j)
inline double switching_term(const ModelSpec& spec, const TestFunction& f, const Vec& x, int i) {
    const Mat q = spec.q_matrix(x);
    double s = 0.0;
    for (int j = 1; j <= spec.num_regimes; ++j) s += spec.q_entry(q, i, j) * f.value(x, j);
    if (!std::isfinite(s))
        throw GeneratorError("switching_term: non-finite value at " + format_point(x, i));
    return s;
}

// Compensated jump integral
//   int [f(x+z,i) - f(x,i) - grad f(x,i).z 1_{|z|<1}] pi_i(x, z) dz
// evaluated in radial-angular coordinates, split at |z| = small_jump_radius.
// The inner integrand is O(|z|^2) at the origin, so the product with a
// stable-like kernel stays integrable; adaptive subdivision is seeded with
// geometrically graded breakpoints towards 0.
inline NonlocalResult nonlocal_term_full(const ModelSpec& spec, const TestFunction& f, const Vec& x,
                                         int i, const QuadratureConfig& cfg = {}) {
    cfg.check();
    NonlocalResult out;
    if (!spec.has_jumps()) return out;
    if (spec.dim > 3) throw GeneratorError("nonlocal_term: quadrature supports d <= 3 only");

    const double fx = f.value(x, i);
    const Vec gx = f.gradient(x, i);
    const Mat hx = f.hessian(x, i);
    // Below r_cut the finite difference f(x+z) - f(x) - grad.z is dominated
    // by rounding noise, which the singular kernel amplifies into a divergent
    // contribution; the exact Taylor term (1/2) z'Hz takes over there.
    const double r_cut = 1e-4 * (1.0 + norm(x));
    const double s = cfg.small_jump_radius;
    const double R = cfg.outer_radius;
    const int n_ball = std::max(1, static_cast<int>(std::ceil(norm(x))));

    // integrability pre-check for polynomially growing f: the envelope tail
    // must decay faster than |z|^{-p-d}
    if (f.growth == TestFunction::Growth::polynomial) {
        auto tail_density = [&](double r) {
            Vec z(spec.dim, 0.0);
            z[0] = r;
            return spec.jump_envelope(z, n_ball) * std::pow(r, f.growth_power + spec.dim - 1);
        };
        const double g1 = tail_density(R / 2), g2 = tail_density(R);
        if (g2 > 0.0 && g1 > 0.0) {
            const double slope = std::log(g2 / g1) / std::log(2.0);
            if (slope >= -1.01)
                throw GeneratorError(
                    "nonlocal_term: integrability violation (envelope tail too heavy for "
                    "growth_tag polynomial(" +
                    std::to_string(f.growth_power) + "))");
        }
    }

    const auto rule = detail::angular_rule(spec.dim, cfg.angular_order);
    double total = 0.0, err = 0.0, abs_sum = 0.0;
    Vec z(spec.dim);
    for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
        const Vec& u = rule.dirs[k];
        const double gdotu = dot(gx, u);
        const double uhu = dot(u, matvec(hx, u));
        auto integrand = [&](double r) -> double {
            for (int c = 0; c < spec.dim; ++c) z[c] = r * u[c];
            double val;
            if (r < r_cut) {
                val = 0.5 * uhu * r * r;
            } else {
                Vec xz = x;
                axpy(r, u, xz);
                val = f.value(xz, i) - fx;
                if (r < 1.0) val -= gdotu * r;
            }
            const double dens = spec.jump_density(x, i, z);
            return val * dens * std::pow(r, spec.dim - 1);
        };
        auto inner_breaks = quad::graded_breaks(0.0, s, 30);
        inner_breaks.push_back(std::min(r_cut, s));
        auto inner = quad::integrate_breaks(integrand, inner_breaks, cfg.rel_tol * 0.1, 1e-14,
                                            cfg.max_subdivisions);
        auto outer = quad::integrate_breaks(integrand, quad::log_breaks(s, R, 6),
                                            cfg.rel_tol * 0.1, 1e-14, cfg.max_subdivisions);
        const double dir_val = inner.value + outer.value;
        total += rule.weights[k] * dir_val;
        err += rule.weights[k] * (inner.error + outer.error);
        abs_sum += rule.weights[k] * std::abs(dir_val);

        // tail beyond R: envelope mass times a growth bound for |f|
        Vec zR(spec.dim);
        for (int c = 0; c < spec.dim; ++c) zR[c] = R * u[c];
        auto tail_mass = [&](double r) {
            Vec zz(spec.dim);
            for (int c = 0; c < spec.dim; ++c) zz[c] = r * u[c];
            return spec.jump_envelope(zz, n_ball) * std::pow(r, spec.dim - 1);
        };
        const double mass =
            quad::integrate_breaks(tail_mass, quad::log_breaks(R, R * 1e3, 3), 1e-6).value;
        Vec xR = x;
        axpy(R, u, xR);
        const double fbound = f.growth == TestFunction::Growth::bounded
                                  ? std::abs(f.value(xR, i)) + std::abs(fx)
                                  : std::pow(norm(x) + R * 1e3, f.growth_power) + std::abs(fx);
        out.tail_bound += rule.weights[k] * mass * fbound;
    }
    const double scale = std::max({std::abs(total), abs_sum, 1e-12});
    if (err > cfg.rel_tol * scale)
        throw GeneratorError("nonlocal_term: quadrature error " + std::to_string(err) +
                             " above tolerance " + std::to_string(cfg.rel_tol * scale));
    if (!std::isfinite(total))
        throw GeneratorError("nonlocal_term: non-finite integral at " + format_point(x, i));
    out.value = total;
    out.error_bound = err;
    return out;
}

inline double nonlocal_term(const ModelSpec& spec, const TestFunction& f, const Vec& x, int i,
                            const QuadratureConfig& cfg = {}) {
    return nonlocal_term_full(spec, f, x, i, cfg).value;
}

// G f(x, i) = L_i f + nonlocal + Q(x) f(x, .)(i)
inline double apply_generator(const ModelSpec& spec, const TestFunction& f, const Vec& x, int i,
                              const QuadratureConfig& cfg = {}) {
    double v = local_term(spec, f, x, i) + switching_term(spec, f, x, i);
    if (spec.has_jumps()) v += nonlocal_term_full(spec, f, x, i, cfg).value;
    return v;
}

}  // namespace rsjd

#endif
