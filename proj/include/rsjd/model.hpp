#ifndef RSJD_MODEL_HPP
#define RSJD_MODEL_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rsjd/common.hpp"
#include "rsjd/quadrature.hpp"
#include "rsjd/rng.hpp"

namespace rsjd {

// Optional closed-form jump moments. When present the simulator uses them
// instead of per-step quadrature for the compensator drift and the
// small-jump Gaussian correction. Builtin families supply these.
struct JumpAux {
    // integral of z over eps <= |z| < 1 against pi_i(x, z) dz
    std::function<Vec(const Vec& x, int i, double eps)> compensator_mean;
    // integral of z z' over |z| < eps against pi_i(x, z) dz
    std::function<Mat(const Vec& x, int i, double eps)> small_cov;
};

// Full description of one regime-switching jump diffusion: coefficients,
// jump kernel with its dominating envelope, and the switching rate matrix.
// Regimes are indexed 1..num_regimes. Immutable after construction and safe
// to share across threads.
struct ModelSpec {
    int dim = 1;
    int num_regimes = 1;
    std::function<Vec(const Vec& x, int i)> drift;
    std::function<Mat(const Vec& x, int i)> diffusion;  // sigma(x, i)
    // density pi_i(x, z); empty function means no jumps
    std::function<double(const Vec& x, int i, const Vec& z)> jump_density;
    // dominating envelope density Pi_n(z) for x in B(0, n)
    std::function<double(const Vec& z, int n)> jump_envelope;
    std::function<Mat(const Vec& x)> q_matrix;  // m x m row-major
    double q_bound = 0.0;                       // >= sup_x max_i(-q_ii(x))
    std::string name;
    std::map<std::string, double> params;
    std::optional<JumpAux> jump_aux;

    bool has_jumps() const { return static_cast<bool>(jump_density); }

    // a(x, i) = sigma sigma'
    Mat a_matrix(const Vec& x, int i) const {
        Mat s = diffusion(x, i);
        return mat_abt(s, s, static_cast<std::size_t>(dim));
    }

    double q_entry(const Mat& q, int i, int j) const {
        return q[static_cast<std::size_t>(i - 1) * num_regimes + (j - 1)];
    }
};

enum class CheckStatus { pass, fail, not_checkable };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        default: return "not-checkable";
    }
}

struct AssumptionCheck {
    std::string id;  // A1, A2, A3, A4-spot
    CheckStatus status = CheckStatus::pass;
    Vec witness_x;  // worst-case sample point
    int witness_regime = 1;
    double margin = 0.0;
    std::string note;
};

struct ValidationReport {
    std::vector<AssumptionCheck> entries;

    const AssumptionCheck* find(const std::string& id) const {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    }
    bool all_passed() const {
        for (const auto& e : entries)
            if (e.status == CheckStatus::fail) return false;
        return true;
    }
};

namespace detail {

inline Vec sample_in_box(CounterRng& rng, int dim, double radius) {
    Vec x(dim);
    for (auto& v : x) v = rng.uniform(-radius, radius);
    return x;
}

inline Vec sample_unit_vector(CounterRng& rng, int dim) {
    Vec u(dim);
    double n = 0.0;
    do {
        for (auto& v : u) v = rng.normal();
        n = norm(u);
    } while (n < 1e-12);
    for (auto& v : u) v /= n;
    return u;
}

}  // namespace detail

// Randomized check of the standing assumptions on B(0, box_radius).
// Sampling-based: reports margins as evidence, not proof. Throws ModelError
// on non-finite coefficients or Q row-sum violations (hard structural bugs).
inline ValidationReport validate_spec(const ModelSpec& spec, double box_radius, int sample_count,
                                      std::uint64_t seed) {
    if (spec.dim < 1 || spec.num_regimes < 1) throw ModelError("validate_spec: malformed spec");
    if (box_radius <= 0.0) throw ModelError("validate_spec: box_radius must be positive");
    CounterRng rng = CounterRng::stream(seed, 0);
    const int d = spec.dim, m = spec.num_regimes;
    ValidationReport report;

    // ---- (A1): linear growth of b, sigma; Q well-formed and bounded ----
    {
        AssumptionCheck a1{"A1"};
        double worst_growth = 0.0;
        bool q_sign_ok = true, q_bound_ok = true;
        Vec q_witness;
        double q_margin = 0.0;
        for (int s = 0; s < sample_count; ++s) {
            Vec x = detail::sample_in_box(rng, d, box_radius);
            for (int i = 1; i <= m; ++i) {
                Vec b = spec.drift(x, i);
                Mat sg = spec.diffusion(x, i);
                if (!all_finite(b) || !all_finite(sg))
                    throw ModelError("validate_spec: non-finite coefficient at " +
                                     format_point(x, i));
                double mass = 0.0;
                for (double v : b) mass += std::abs(v);
                for (double v : sg) mass += std::abs(v);
                const double growth = mass / (1.0 + norm(x));
                if (growth > worst_growth) {
                    worst_growth = growth;
                    a1.witness_x = x;
                    a1.witness_regime = i;
                }
            }
            Mat q = spec.q_matrix(x);
            if (!all_finite(q))
                throw ModelError("validate_spec: non-finite Q entry at " + format_point(x, 1));
            for (int i = 1; i <= m; ++i) {
                double row = 0.0;
                for (int j = 1; j <= m; ++j) {
                    const double qij = spec.q_entry(q, i, j);
                    row += qij;
                    if (i != j && qij < 0.0 && q_sign_ok) {
                        q_sign_ok = false;
                        q_witness = x;
                        q_margin = qij;
                        a1.witness_regime = i;
                    }
                }
                if (std::abs(row) > 1e-12)
                    throw ModelError("validate_spec: Q row " + std::to_string(i) +
                                     " sums to " + std::to_string(row) + " at " +
                                     format_point(x, i));
                if (-spec.q_entry(q, i, i) > spec.q_bound + 1e-12 && q_bound_ok) {
                    q_bound_ok = false;
                    q_witness = x;
                    q_margin = -spec.q_entry(q, i, i) - spec.q_bound;
                    a1.witness_regime = i;
                }
            }
        }
        if (!q_sign_ok || !q_bound_ok) {
            a1.status = CheckStatus::fail;
            a1.witness_x = q_witness;
            a1.margin = q_margin;
            a1.note = !q_sign_ok ? "negative off-diagonal q_ij" : "q_bound below sampled -q_ii";
        } else {
            a1.margin = worst_growth;  // observed linear-growth constant
            a1.note = "observed growth constant c";
        }
        report.entries.push_back(std::move(a1));
    }

    // ---- (A2): local uniform ellipticity; margin = sampled kappa_0 ----
    {
        AssumptionCheck a2{"A2"};
        double kappa0 = std::numeric_limits<double>::infinity();
        for (int s = 0; s < sample_count; ++s) {
            Vec x = detail::sample_in_box(rng, d, box_radius);
            Vec xi = detail::sample_unit_vector(rng, d);
            for (int i = 1; i <= m; ++i) {
                Mat a = spec.a_matrix(x, i);
                const double rq = dot(xi, matvec(a, xi));
                if (!std::isfinite(rq))
                    throw ModelError("validate_spec: non-finite a(x,i) at " + format_point(x, i));
                if (rq < kappa0) {
                    kappa0 = rq;
                    a2.witness_x = x;
                    a2.witness_regime = i;
                }
            }
        }
        a2.margin = kappa0;
        a2.status = kappa0 > 1e-12 ? CheckStatus::pass : CheckStatus::fail;
        a2.note = "smallest sampled Rayleigh quotient of a(x,i)";
        report.entries.push_back(std::move(a2));
    }

    // ---- (A3): envelope domination and (1 ^ |z|^2)-integrability ----
    {
        AssumptionCheck a3{"A3"};
        if (!spec.has_jumps()) {
            a3.status = CheckStatus::pass;
            a3.note = "no jump component";
        } else {
            const int n_ball = std::max(1, static_cast<int>(std::ceil(box_radius)));
            double worst_gap = std::numeric_limits<double>::infinity();
            bool dominated = true;
            for (int s = 0; s < sample_count; ++s) {
                Vec x = detail::sample_in_box(rng, d, box_radius);
                // sample |z| log-uniformly so both the singular core and the
                // tail get probed
                Vec u = detail::sample_unit_vector(rng, d);
                const double r = std::pow(10.0, rng.uniform(-6.0, 2.0));
                Vec z = r * u;
                for (int i = 1; i <= m; ++i) {
                    const double pd = spec.jump_density(x, i, z);
                    const double env = spec.jump_envelope(z, n_ball);
                    if (!std::isfinite(pd) || pd < 0.0)
                        throw ModelError("validate_spec: bad jump density at " +
                                         format_point(x, i));
                    const double gap = env - pd;
                    if (gap < worst_gap) {
                        worst_gap = gap;
                        a3.witness_x = x;
                        a3.witness_regime = i;
                    }
                    if (pd > env * (1.0 + 1e-9) + 1e-300) dominated = false;
                }
            }
            // quadrature of (1 ^ |z|^2) Pi_n(dz) up to a truncation radius
            const double trunc = 1e4;
            auto radial = [&](double r) {
                Vec z(d, 0.0);
                z[0] = r;  // envelope probed along e1; isotropy is the normal case
                double surf = d == 1 ? 2.0 : (d == 2 ? 6.283185307179586 : 12.566370614359172);
                return std::min(1.0, r * r) * spec.jump_envelope(z, n_ball) * surf *
                       std::pow(r, d - 1);
            };
            auto inner = quad::integrate_breaks(radial, quad::graded_breaks(0.0, 1.0), 1e-8);
            auto outer = quad::integrate_breaks(radial, quad::log_breaks(1.0, trunc), 1e-8);
            const double mass = inner.value + outer.value;
            a3.status = dominated && std::isfinite(mass) ? CheckStatus::pass : CheckStatus::fail;
            a3.margin = dominated ? mass : worst_gap;
            a3.note = dominated ? "integral of (1^|z|^2) Pi_n(dz) up to R=1e4"
                                : "envelope fails to dominate density";
        }
        report.entries.push_back(std::move(a3));
    }

    // ---- (A4): comparability, spot-checked on sampled triples ----
    {
        AssumptionCheck a4{"A4-spot"};
        if (!spec.has_jumps()) {
            a4.status = CheckStatus::not_checkable;
            a4.note = "no jump density";
        } else {
            double worst_ratio = 1.0;
            for (int s = 0; s < sample_count; ++s) {
                Vec x0 = detail::sample_in_box(rng, d, box_radius);
                const double r = rng.uniform(0.1, 0.9);
                Vec x = x0 + (0.4 * r * rng.uniform()) * detail::sample_unit_vector(rng, d);
                Vec y = x0 + (0.4 * r * rng.uniform()) * detail::sample_unit_vector(rng, d);
                Vec z = x0 + (r * (1.0 + 3.0 * rng.uniform())) * detail::sample_unit_vector(rng, d);
                for (int i = 1; i <= m; ++i) {
                    const double px = spec.jump_density(x, i, z - x);
                    const double py = spec.jump_density(y, i, z - y);
                    if (px > 0.0 && py > 0.0) worst_ratio = std::max(worst_ratio, px / py);
                }
            }
            a4.margin = worst_ratio;  // observed alpha_r; the bound itself is not asserted
            a4.status = std::isfinite(worst_ratio) ? CheckStatus::pass : CheckStatus::fail;
            a4.note = "largest sampled comparability ratio";
        }
        report.entries.push_back(std::move(a4));
    }

    return report;
}

}  // namespace rsjd

#endif
