#ifndef RSJD_LYAPUNOV_HPP
#define RSJD_LYAPUNOV_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rsjd/common.hpp"
#include "rsjd/generator.hpp"
#include "rsjd/model.hpp"
#include "rsjd/test_function.hpp"

namespace rsjd {

enum class Criterion { C1, C2, E51, E52 };
enum class CritStatus { holds_on_grid, fails, inconclusive };

inline const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::C1: return "C1";
        case Criterion::C2: return "C2";
        case Criterion::E51: return "E51";
        default: return "E52";
    }
}
inline const char* to_string(CritStatus s) {
    switch (s) {
        case CritStatus::holds_on_grid: return "holds-on-grid";
        case CritStatus::fails: return "fails";
        default: return "inconclusive";
    }
}

struct GridViolation {
    Vec x;
    int regime;
    double value;
};

// Grid verification result. "holds-on-grid" is evidence, not proof: the
// inequality was checked at the tested points only.
struct CriterionReport {
    Criterion criterion = Criterion::C1;
    CritStatus status = CritStatus::inconclusive;
    double witness_radius = std::numeric_limits<double>::quiet_NaN();  // r*
    double margin = std::numeric_limits<double>::quiet_NaN();  // worst GV beyond r*
    double required_scale = std::numeric_limits<double>::quiet_NaN();  // C1 via cV
    std::string grid_desc;
    std::vector<GridViolation> failures;
    // C2 growth evidence
    double growth_ratio = 0.0;
    bool growth_ok = false;
    // E51: worst criterion value at the largest radius, per tested N
    std::map<double, double> e51_values;
};

// ---------------------------------------------------------------------------
// Builtin Lyapunov families
// ---------------------------------------------------------------------------

namespace detail {

// Radial profile g(|x|) with g(r) = r^delta for r >= 1 and an even
// polynomial in r^2 inside the unit ball matching value, gradient and
// Hessian at r = 1 (C^2 everywhere, symmetric at 0).
struct RadialPower {
    double delta;
    double a, b, c;  // p(u) = a + b u + c u^2, u = r^2

    explicit RadialPower(double d) : delta(d) {
        c = delta * (delta - 2.0) / 8.0;
        b = delta / 2.0 - 2.0 * c;
        a = 1.0 - b - c;
    }
    double value(double r2) const {
        if (r2 >= 1.0) return std::pow(r2, 0.5 * delta);
        return a + b * r2 + c * r2 * r2;
    }
    // dg/d(r^2) and d2g/d(r^2)^2; gradient = 2 p'(u) x, hessian = 2p' I + 4p'' x x'
    double d1(double r2) const {
        if (r2 >= 1.0) return 0.5 * delta * std::pow(r2, 0.5 * delta - 1.0);
        return b + 2.0 * c * r2;
    }
    double d2(double r2) const {
        if (r2 >= 1.0) return 0.5 * delta * (0.5 * delta - 1.0) * std::pow(r2, 0.5 * delta - 2.0);
        return 2.0 * c;
    }
};

// Quintic Hermite h on [t0, t1] with prescribed value/first/second
// derivatives at both ends.
struct Quintic {
    double t0, t1;
    double coef[6];

    Quintic(double a, double b, double v0, double d0, double s0, double v1, double d1, double s1)
        : t0(a), t1(b) {
        const double h = b - a;
        // basis in normalized s = (t - t0)/h
        const double p0 = v0, p1 = d0 * h, p2 = s0 * h * h;
        const double q0 = v1, q1 = d1 * h, q2 = s1 * h * h;
        coef[0] = p0;
        coef[1] = p1;
        coef[2] = 0.5 * p2;
        coef[3] = -10.0 * p0 - 6.0 * p1 - 1.5 * p2 + 10.0 * q0 - 4.0 * q1 + 0.5 * q2;
        coef[4] = 15.0 * p0 + 8.0 * p1 + 1.5 * p2 - 15.0 * q0 + 7.0 * q1 - q2;
        coef[5] = -6.0 * p0 - 3.0 * p1 - 0.5 * p2 + 6.0 * q0 - 3.0 * q1 + 0.5 * q2;
    }
    double eval(double t, int deriv = 0) const {
        const double h = t1 - t0, s = (t - t0) / h;
        double v = 0.0;
        for (int k = 5; k >= deriv; --k) {
            double term = coef[k];
            for (int j = 0; j < deriv; ++j) term *= (k - j);
            v = v * s + term;
        }
        return v / std::pow(h, deriv);
    }
};

}  // namespace detail

// families:
//   power-radial        params: delta in (0, 2)
//   radial-linear       (the delta = 1 profile)
//   shifted-power-first-coordinate  params: beta > 0, gamma > 2,
//       optional cap_start/cap_end for a bounded C^2 plateau
inline TestFunction builtin_lyapunov(const std::string& family,
                                     const std::map<std::string, double>& params, int dim) {
    auto get = [&](const std::string& k, double fb) {
        auto it = params.find(k);
        return it == params.end() ? fb : it->second;
    };
    if (family == "power-radial" || family == "radial-linear") {
        const double delta = family == "radial-linear" ? 1.0 : get("delta", 0.5);
        if (!(delta > 0.0 && delta < 2.0))
            throw std::invalid_argument("builtin_lyapunov: delta must be in (0, 2)");
        detail::RadialPower prof(delta);
        TestFunction f;
        f.value = [prof](const Vec& x, int) { return prof.value(dot(x, x)); };
        f.gradient = [prof](const Vec& x, int) {
            const double r2 = dot(x, x);
            Vec g = x;
            const double c = 2.0 * prof.d1(r2);
            for (auto& v : g) v *= c;
            return g;
        };
        f.hessian = [prof, dim](const Vec& x, int) {
            const double r2 = dot(x, x);
            const double c1 = 2.0 * prof.d1(r2), c2 = 4.0 * prof.d2(r2);
            Mat h(dim * dim, 0.0);
            for (int r = 0; r < dim; ++r) {
                h[r * dim + r] = c1;
                for (int c = 0; c < dim; ++c) h[r * dim + c] += c2 * x[r] * x[c];
            }
            return h;
        };
        f.growth = TestFunction::Growth::polynomial;
        f.growth_power = delta;
        f.name = family;
        return f;
    }
    if (family == "shifted-power-first-coordinate") {
        const double beta = get("beta", 1.0), gamma = get("gamma", 3.0);
        const double cap_start = get("cap_start", std::numeric_limits<double>::infinity());
        const double cap_end = get("cap_end", cap_start + 2.0);
        if (!(beta > 0.0)) throw std::invalid_argument("builtin_lyapunov: beta must be > 0");
        if (!(gamma > 2.0)) throw std::invalid_argument("builtin_lyapunov: gamma must be > 2");
        const bool capped = std::isfinite(cap_start);
        std::shared_ptr<detail::Quintic> plateau;
        double flat = 0.0;
        if (capped) {
            const double v0 = std::pow(cap_start, gamma);
            const double d0 = gamma * std::pow(cap_start, gamma - 1.0);
            const double s0 = gamma * (gamma - 1.0) * std::pow(cap_start, gamma - 2.0);
            flat = v0 + 0.5 * d0 * (cap_end - cap_start);
            plateau = std::make_shared<detail::Quintic>(cap_start, cap_end, v0, d0, s0, flat, 0.0,
                                                        0.0);
        }
        auto profile = [=](double p, int deriv) -> double {
            if (p <= 0.0) return 0.0;
            if (!capped || p < cap_start) {
                double v = std::pow(p, gamma);
                for (int j = 0; j < deriv; ++j) v *= (gamma - j) / p;
                return v;
            }
            if (p >= cap_end) return deriv == 0 ? flat : 0.0;
            return plateau->eval(p, deriv);
        };
        TestFunction f;
        f.value = [profile, beta](const Vec& x, int) { return profile(x[0] + beta, 0); };
        f.gradient = [profile, beta, dim](const Vec& x, int) {
            Vec g(dim, 0.0);
            g[0] = profile(x[0] + beta, 1);
            return g;
        };
        f.hessian = [profile, beta, dim](const Vec& x, int) {
            Mat h(dim * dim, 0.0);
            h[0] = profile(x[0] + beta, 2);
            return h;
        };
        f.growth = capped ? TestFunction::Growth::bounded : TestFunction::Growth::polynomial;
        f.growth_power = capped ? 0.0 : gamma;
        f.name = family;
        return f;
    }
    throw std::invalid_argument("builtin_lyapunov: unknown family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Grid checks
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> log_radii(double r_min, double r_max, int count) {
    std::vector<double> radii;
    for (int k = 0; k < count; ++k)
        radii.push_back(r_min * std::pow(r_max / r_min, count == 1 ? 0.0 : double(k) / (count - 1)));
    return radii;
}

struct ShellScan {
    std::vector<double> radii;
    std::vector<double> shell_worst;  // max of GV over directions x regimes, per shell
    std::vector<double> shell_inf_v;  // min of V, per shell
    std::vector<GridViolation> violations_below;  // points violating the threshold
};

inline ShellScan scan_shells(const ModelSpec& spec, const TestFunction& V, double r_min,
                             double r_max, int radii_count, int directions,
                             const QuadratureConfig& cfg, double threshold) {
    if (!(r_min > 0.0 && r_min < r_max))
        throw std::invalid_argument("shell scan: need 0 < r_min < r_max");
    ShellScan scan;
    scan.radii = log_radii(r_min, r_max, radii_count);
    const auto dirs = sphere_directions(spec.dim, spec.dim == 1 ? 2 : directions);
    for (double r : scan.radii) {
        double worst = -std::numeric_limits<double>::infinity();
        double infv = std::numeric_limits<double>::infinity();
        GridViolation worst_point;
        for (const auto& u : dirs) {
            Vec x = r * u;
            for (int i = 1; i <= spec.num_regimes; ++i) {
                const double v = V.value(x, i);
                if (v < 0.0)
                    throw std::invalid_argument("Lyapunov candidate negative at " +
                                                format_point(x, i));
                infv = std::min(infv, v);
                const double gv = apply_generator(spec, V, x, i, cfg);
                if (gv > worst) {
                    worst = gv;
                    worst_point = {x, i, gv};
                }
            }
        }
        scan.shell_worst.push_back(worst);
        scan.shell_inf_v.push_back(infv);
        if (worst > threshold) scan.violations_below.push_back(worst_point);
    }
    return scan;
}

inline std::string grid_desc(double r_min, double r_max, int radii, int dirs, int m) {
    std::ostringstream os;
    os << radii << " log-spaced shells in [" << r_min << ", " << r_max << "] x " << dirs
       << " directions x " << m << " regimes";
    return os.str();
}

// Shared shell bookkeeping for C1 (threshold -1) and the inequality part of
// C2 (threshold 0): r* is the smallest tested radius beyond which every
// shell satisfies the threshold.
inline void classify_shells(CriterionReport& rep, const ShellScan& scan, double threshold) {
    const int n = static_cast<int>(scan.radii.size());
    int first_ok = n;  // first index such that all shells >= it are ok
    for (int k = n - 1; k >= 0; --k) {
        if (scan.shell_worst[k] <= threshold)
            first_ok = k;
        else
            break;
    }
    if (first_ok == n) {
        rep.status = CritStatus::fails;
        rep.margin = scan.shell_worst[n - 1];
    } else if (first_ok == n - 1) {
        // only the outermost shell satisfies the bound: no interior margin
        rep.status = CritStatus::inconclusive;
        rep.witness_radius = scan.radii[first_ok];
        rep.margin = scan.shell_worst[n - 1];
    } else {
        rep.status = CritStatus::holds_on_grid;
        rep.witness_radius = scan.radii[first_ok];
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = first_ok; k < n; ++k) worst = std::max(worst, scan.shell_worst[k]);
        rep.margin = worst;
    }
    // violations below r* are reported either way
    for (const auto& v : scan.violations_below)
        if (!(rep.status != CritStatus::fails && norm(v.x) >= rep.witness_radius))
            rep.failures.push_back(v);
}

}  // namespace detail

// Condition (C1): G V <= -1 outside a ball, checked on a radial grid.
inline CriterionReport check_c1(const ModelSpec& spec, const TestFunction& V, double r_min,
                                double r_max, int radii = 32, int directions = 16,
                                const QuadratureConfig& cfg = {}) {
    CriterionReport rep;
    rep.criterion = Criterion::C1;
    rep.grid_desc = detail::grid_desc(r_min, r_max, radii, spec.dim == 1 ? 2 : directions,
                                      spec.num_regimes);
    auto scan = detail::scan_shells(spec, V, r_min, r_max, radii, directions, cfg, -1.0);
    detail::classify_shells(rep, scan, -1.0);
    // by linearity, cV satisfies GV <= -1 whenever the margin is negative
    if (rep.status != CritStatus::holds_on_grid) {
        double worst_tail = scan.shell_worst.back();
        if (worst_tail < 0.0) rep.required_scale = 1.0 / (-worst_tail);
    } else {
        rep.required_scale = 1.0;
    }
    return rep;
}

// Condition (C2): G V <= 0 on the grid plus growth evidence: the per-shell
// infimum of V must increase strictly across shells and at least double
// from r_min to r_max. Growth along tested shells only; this is evidence of
// radial divergence, not proof.
inline CriterionReport check_c2(const ModelSpec& spec, const TestFunction& V, double r_min,
                                double r_max, int radii = 32, int directions = 16,
                                const QuadratureConfig& cfg = {}) {
    CriterionReport rep;
    rep.criterion = Criterion::C2;
    rep.grid_desc = detail::grid_desc(r_min, r_max, radii, spec.dim == 1 ? 2 : directions,
                                      spec.num_regimes);
    auto scan = detail::scan_shells(spec, V, r_min, r_max, radii, directions, cfg, 0.0);
    detail::classify_shells(rep, scan, 0.0);
    bool increasing = true;
    for (std::size_t k = 1; k < scan.shell_inf_v.size(); ++k)
        if (scan.shell_inf_v[k] <= scan.shell_inf_v[k - 1]) increasing = false;
    rep.growth_ratio = scan.shell_inf_v.back() / std::max(scan.shell_inf_v.front(), 1e-300);
    rep.growth_ok = increasing && rep.growth_ratio >= 2.0;
    if (!rep.growth_ok && rep.status == CritStatus::holds_on_grid) rep.status = CritStatus::fails;
    return rep;
}

namespace detail {

// helper integrals of Example 5.2: A(x,i) = b + int_{1<|z|<=|x|} z pi dz,
// B(x,i) = int_{|z|>|x|} |z| pi dz (truncated at cfg.outer_radius)
inline double e52_A(const ModelSpec& spec, double x, int i, const QuadratureConfig& cfg) {
    double A = spec.drift(Vec{x}, i)[0];
    const double ax = std::abs(x);
    if (spec.has_jumps() && ax > 1.0) {
        auto f = [&](double z) { return z * spec.jump_density(Vec{x}, i, Vec{z}); };
        A += quad::integrate_breaks(f, quad::log_breaks(1.0, ax, 8), 1e-9).value;
        auto fneg = [&](double r) { return -r * spec.jump_density(Vec{x}, i, Vec{-r}); };
        A += quad::integrate_breaks(fneg, quad::log_breaks(1.0, ax, 8), 1e-9).value;
    }
    return A;
}

inline double e52_B(const ModelSpec& spec, double x, int i, const QuadratureConfig& cfg) {
    if (!spec.has_jumps()) return 0.0;
    const double ax = std::max(std::abs(x), 1e-6);
    auto f = [&](double r) {
        return r * (spec.jump_density(Vec{x}, i, Vec{r}) + spec.jump_density(Vec{x}, i, Vec{-r}));
    };
    return quad::integrate_breaks(f, quad::log_breaks(ax, cfg.outer_radius * 1e3, 4), 1e-9).value;
}

}  // namespace detail

// Example 5.2 drift-jump criterion (d = 1): A(x,i) sgn(x) + B(x,i) must be
// negative with non-increasing margins beyond some tested radius.
inline CriterionReport drift_jump_criterion_1d(const ModelSpec& spec,
                                               const std::vector<double>& radii,
                                               const QuadratureConfig& cfg = {}) {
    if (spec.dim != 1)
        throw std::invalid_argument("drift_jump_criterion_1d: requires d = 1");
    if (radii.empty()) throw std::invalid_argument("drift_jump_criterion_1d: empty radius list");
    CriterionReport rep;
    rep.criterion = Criterion::E52;

    // integrability of int_{|z|>=1} |z| pi dz, checked against the envelope
    if (spec.has_jumps()) {
        auto tail = [&](double r) {
            return r * spec.jump_envelope(Vec{r}, 1) + r * spec.jump_envelope(Vec{-r}, 1);
        };
        const double g1 = tail(cfg.outer_radius / 2), g2 = tail(cfg.outer_radius);
        if (g1 > 0.0 && g2 > 0.0 && std::log(g2 / g1) / std::log(2.0) >= -1.01)
            throw GeneratorError("drift_jump_criterion_1d: integrability violation");
    }

    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream os;
    os << sorted.size() << " radii in [" << sorted.front() << ", " << sorted.back()
       << "], both signs x " << spec.num_regimes << " regimes";
    rep.grid_desc = os.str();

    std::vector<double> worst_per_radius;
    for (double r : sorted) {
        double worst = -std::numeric_limits<double>::infinity();
        GridViolation wp;
        for (double x : {r, -r}) {
            for (int i = 1; i <= spec.num_regimes; ++i) {
                const double val = detail::e52_A(spec, x, i, cfg) * sgn(x) +
                                   detail::e52_B(spec, x, i, cfg);
                if (val > worst) {
                    worst = val;
                    wp = {Vec{x}, i, val};
                }
            }
        }
        worst_per_radius.push_back(worst);
        if (worst >= 0.0) rep.failures.push_back(wp);
    }

    // smallest r* with negative, non-increasing margins beyond it
    const int n = static_cast<int>(sorted.size());
    int first_ok = n;
    for (int k = n - 1; k >= 0; --k) {
        const bool ok = worst_per_radius[k] < 0.0 &&
                        (k == n - 1 || worst_per_radius[k + 1] <= worst_per_radius[k] + 1e-12);
        if (ok)
            first_ok = k;
        else
            break;
    }
    if (worst_per_radius[n - 1] >= 0.0) {
        rep.status = CritStatus::fails;
        rep.margin = worst_per_radius[n - 1];
    } else if (first_ok == n || first_ok == n - 1) {
        rep.status = CritStatus::inconclusive;
        rep.margin = worst_per_radius[n - 1];
        rep.witness_radius = sorted[n - 1];
    } else {
        rep.status = CritStatus::holds_on_grid;
        rep.witness_radius = sorted[first_ok];
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = first_ok; k < n; ++k) worst = std::max(worst, worst_per_radius[k]);
        rep.margin = worst;
    }
    return rep;
}

// Example 5.1 criterion: b'x/|x|^{2-delta} + N int_{|z|>1} |z|^delta pi dz
// evaluated on shells for N in {1, 10, 100} (the constant N is free).
// Status holds-on-grid when the value decreases across shells for every N.
inline CriterionReport e51_criterion(const ModelSpec& spec, double delta,
                                     const std::vector<double>& radii, int directions = 16,
                                     const QuadratureConfig& cfg = {},
                                     const std::vector<double>& big_ns = {1.0, 10.0, 100.0}) {
    CriterionReport rep;
    rep.criterion = Criterion::E51;
    const auto dirs = detail::sphere_directions(spec.dim, spec.dim == 1 ? 2 : directions);
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());

    auto jump_moment = [&](const Vec& x, int i) -> double {
        if (!spec.has_jumps()) return 0.0;
        const auto rule = detail::angular_rule(spec.dim, cfg.angular_order);
        double total = 0.0;
        for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
            auto f = [&](double r) {
                Vec z = r * rule.dirs[k];
                return std::pow(r, delta + spec.dim - 1) * spec.jump_density(x, i, z);
            };
            total += rule.weights[k] *
                     quad::integrate_breaks(f, quad::log_breaks(1.0, cfg.outer_radius * 1e3, 4),
                                            1e-9)
                         .value;
        }
        return total;
    };

    bool all_decreasing = true;
    for (double N : big_ns) {
        double prev = std::numeric_limits<double>::infinity();
        double last_worst = 0.0;
        for (double r : sorted) {
            double worst = -std::numeric_limits<double>::infinity();
            for (const auto& u : dirs) {
                Vec x = r * u;
                for (int i = 1; i <= spec.num_regimes; ++i) {
                    const double val = dot(spec.drift(x, i), x) / std::pow(norm(x), 2.0 - delta) +
                                       N * jump_moment(x, i);
                    worst = std::max(worst, val);
                }
            }
            if (worst >= prev) all_decreasing = false;
            prev = worst;
            last_worst = worst;
        }
        rep.e51_values[N] = last_worst;
    }
    rep.status = all_decreasing ? CritStatus::holds_on_grid : CritStatus::inconclusive;
    rep.margin = rep.e51_values.empty() ? 0.0 : rep.e51_values.rbegin()->second;
    rep.witness_radius = sorted.back();
    std::ostringstream os;
    os << sorted.size() << " radii, N in {1, 10, 100}";
    rep.grid_desc = os.str();
    return rep;
}

// ---------------------------------------------------------------------------
// Exit-time witness
// ---------------------------------------------------------------------------

// Witness V(x, i) = (x_1 + beta)^gamma (capped to a bounded C^2 plateau away
// from the domain) with beta, gamma chosen from sampled coefficient bounds so
// that G V >= gamma on D x M. The construction follows the finite-exit-time
// argument: beta = D_radius + 1 makes x_1 + beta >= 1 on the ball, and
//   gamma = (2/kappa0) (sup [|b_1|(x_1+beta) + kappa1 (x_1+beta)^2] + 1) + 2.
struct ExitWitness {
    TestFunction V;
    double beta = 0.0;
    double gamma = 0.0;
    double kappa0 = 0.0;  // sampled ellipticity lower bound (a_11)
    double kappa1 = 0.0;  // envelope mass beyond |z| = 1
    bool check_passed = false;
    double min_gv = 0.0;  // smallest G V on the check grid
};

inline ExitWitness exit_witness(const ModelSpec& spec, double D_radius,
                                const QuadratureConfig& cfg = {}, std::uint64_t seed = 20240901) {
    ExitWitness w;
    w.beta = D_radius + 1.0;

    // sampled kappa0 = inf a_11 and the coefficient supremum over the ball
    CounterRng rng = CounterRng::stream(seed, 1);
    double kappa0 = std::numeric_limits<double>::infinity();
    double sup_term = 0.0;
    const int samples = 512;
    for (int s = 0; s < samples; ++s) {
        Vec x = detail::sample_in_box(rng, spec.dim, D_radius);
        if (norm(x) > D_radius) continue;
        for (int i = 1; i <= spec.num_regimes; ++i) {
            const Mat a = spec.a_matrix(x, i);
            kappa0 = std::min(kappa0, a[0]);
            const double p = x[0] + w.beta;
            sup_term = std::max(sup_term, std::abs(spec.drift(x, i)[0]) * p);
        }
    }
    if (!(kappa0 > 0.0))
        throw GeneratorError("exit_witness: sampled ellipticity bound kappa0 <= 0");
    w.kappa0 = kappa0;

    // kappa1: envelope mass beyond |z| = 1 (an upper bound for sup_x pi_i)
    if (spec.has_jumps()) {
        const int n_ball = std::max(1, static_cast<int>(std::ceil(D_radius)));
        const auto rule = detail::angular_rule(spec.dim, cfg.angular_order);
        double mass = 0.0;
        for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
            auto f = [&](double r) {
                Vec z = r * rule.dirs[k];
                return spec.jump_envelope(z, n_ball) * std::pow(r, spec.dim - 1);
            };
            mass += rule.weights[k] *
                    quad::integrate_breaks(f, quad::log_breaks(1.0, 1e8, 4), 1e-9).value;
        }
        w.kappa1 = mass;
        const double pmax = D_radius + w.beta;
        sup_term += w.kappa1 * pmax * pmax;
    }
    w.gamma = 2.0 / kappa0 * (sup_term + 1.0) + 2.0;

    const double cap_start = w.beta + D_radius + 1.0;
    w.V = builtin_lyapunov("shifted-power-first-coordinate",
                           {{"beta", w.beta},
                            {"gamma", w.gamma},
                            {"cap_start", cap_start},
                            {"cap_end", cap_start + 2.0}},
                           spec.dim);

    // numeric check G V >= gamma on a grid over D x M
    double min_gv = std::numeric_limits<double>::infinity();
    const auto dirs = detail::sphere_directions(spec.dim, spec.dim == 1 ? 2 : 16);
    for (int k = 1; k <= 32; ++k) {
        const double r = D_radius * k / 32.0;
        for (const auto& u : dirs) {
            Vec x = r * u;
            for (int i = 1; i <= spec.num_regimes; ++i)
                min_gv = std::min(min_gv, apply_generator(spec, w.V, x, i, cfg));
        }
    }
    w.min_gv = min_gv;
    w.check_passed = min_gv >= w.gamma;
    return w;
}

}  // namespace rsjd

#endif
