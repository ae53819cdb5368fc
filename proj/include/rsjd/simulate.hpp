#ifndef RSJD_SIMULATE_HPP
#define RSJD_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rsjd/common.hpp"
#include "rsjd/model.hpp"
#include "rsjd/quadrature.hpp"
#include "rsjd/rng.hpp"

namespace rsjd {

enum class SmallJumpMode { truncate, gaussian };

struct SimConfig {
    double dt = 1e-3;
    double t_max = 10.0;
    double eps = 0.05;  // small-jump cutoff; proposals are drawn for |z| >= eps
    SmallJumpMode small_jump_mode = SmallJumpMode::gaussian;
    long max_steps = 100000000;
    int max_envelope_index = 4096;  // cap of the adaptive ball index n
    double envelope_r_max = 1e8;    // radial truncation of the proposal table
    int envelope_table_size = 1024;
    bool record_path = true;
    int record_stride = 1;  // keep every k-th step when recording

    void check() const {
        if (!(dt > 0.0)) throw SimulationError("SimConfig: dt must be positive");
        if (!(t_max > 0.0)) throw SimulationError("SimConfig: t_max must be positive");
        if (!(eps > 0.0 && eps <= 1.0))
            throw SimulationError("SimConfig: eps must be in (0, 1]");
        if (max_steps < 1) throw SimulationError("SimConfig: max_steps must be >= 1");
        if (max_envelope_index < 1)
            throw SimulationError("SimConfig: max_envelope_index must be >= 1");
        if (envelope_r_max <= 1.0) throw SimulationError("SimConfig: envelope_r_max too small");
        if (record_stride < 1) throw SimulationError("SimConfig: record_stride must be >= 1");
    }
};

// event flags per recorded step
inline constexpr int kEventNone = 0;
inline constexpr int kEventJump = 1;
inline constexpr int kEventSwitch = 2;
inline constexpr int kEventBoth = 3;

struct SwitchEvent {
    double t;
    int from, to;
};

struct JumpEvent {
    double t;
    Vec z;
};

enum class TerminalReason { horizon, max_steps, left_envelope_ball, stopped };

inline const char* to_string(TerminalReason r) {
    switch (r) {
        case TerminalReason::horizon: return "horizon";
        case TerminalReason::max_steps: return "max_steps";
        case TerminalReason::left_envelope_ball: return "left-envelope-ball";
        default: return "stopped";
    }
}

struct PathRecord {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<int> regimes;
    std::vector<int> event_flags;
    // event lists are filled only when the path itself is recorded
    std::vector<SwitchEvent> switch_events;
    std::vector<JumpEvent> jump_events;
    TerminalReason terminal_reason = TerminalReason::horizon;
    Vec final_x;
    int final_regime = 1;
    double final_time = 0.0;
    long jump_count = 0;
    long switch_count = 0;
    long proposal_count = 0;
};

// ---------------------------------------------------------------------------
// Exact sampling from the envelope measure Pi_n restricted to |z| >= eps
// ---------------------------------------------------------------------------

// Tabulated inverse of the radial mass M(r) = int_eps^r env(s) surf s^{d-1} ds.
// Within a table segment the radial mass density is treated as log-log
// linear, so segments of an exact power-law envelope are inverted exactly and
// thinning against such an envelope accepts with probability one.
//
// The envelope is assumed isotropic (d = 1: symmetric). This is checked at
// construction by probing opposite directions.
class EnvelopeSampler {
  public:
    EnvelopeSampler(const ModelSpec& spec, int n_ball, double eps, double r_max, int table_size)
        : dim_(spec.dim) {
        if (dim_ > 3) throw SimulationError("EnvelopeSampler: supports d <= 3 only");
        const double surf =
            dim_ == 1 ? 2.0 : (dim_ == 2 ? 6.283185307179586 : 12.566370614359172);
        auto radial = [&](double r) {
            Vec z(dim_, 0.0);
            z[0] = r;
            return spec.jump_envelope(z, n_ball) * surf * std::pow(r, dim_ - 1);
        };
        // isotropy probe
        for (double r : {eps, 1.0, 10.0}) {
            Vec zp(dim_, 0.0), zm(dim_, 0.0);
            zp[dim_ - 1] = r;
            zm[dim_ - 1] = -r;
            const double ep = spec.jump_envelope(zp, n_ball), em = spec.jump_envelope(zm, n_ball);
            if (std::abs(ep - em) > 1e-9 * (std::abs(ep) + std::abs(em) + 1e-300))
                throw SimulationError("EnvelopeSampler: envelope must be isotropic");
        }
        nodes_.resize(table_size + 1);
        cum_.assign(table_size + 1, 0.0);
        dens_.resize(table_size + 1);
        const double le = std::log(eps), lr = std::log(r_max);
        for (int k = 0; k <= table_size; ++k) {
            nodes_[k] = std::exp(le + (lr - le) * k / table_size);
            dens_[k] = radial(nodes_[k]);
        }
        for (int k = 0; k < table_size; ++k) {
            auto seg = quad::integrate(radial, nodes_[k], nodes_[k + 1], 1e-10, 0.0, 200);
            cum_[k + 1] = cum_[k] + seg.value;
        }
        rate_ = cum_.back();
        if (!(rate_ >= 0.0) || !std::isfinite(rate_))
            throw SimulationError("EnvelopeSampler: envelope mass is not finite");
    }

    // lambda_n(eps): total envelope mass beyond eps
    double rate() const { return rate_; }

    // radius |z| by inverse CDF; direction drawn uniformly by the caller
    double sample_radius(CounterRng& rng) const {
        const double target = rng.uniform() * rate_;
        std::size_t lo = 0, hi = cum_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (cum_[mid] <= target ? lo : hi) = mid;
        }
        const double a = nodes_[lo], b = nodes_[lo + 1];
        const double mass = cum_[lo + 1] - cum_[lo], frac = target - cum_[lo];
        if (mass <= 0.0) return a;
        // local power p of the radial mass density from the segment endpoints
        const double ga = dens_[lo], gb = dens_[lo + 1];
        double p = 0.0;
        if (ga > 0.0 && gb > 0.0) p = std::log(gb / ga) / std::log(b / a);
        const double u = frac / mass;
        if (std::abs(p + 1.0) < 1e-9) return a * std::pow(b / a, u);
        const double q = p + 1.0;
        return a * std::pow(1.0 - u + u * std::pow(b / a, q), 1.0 / q);
    }

    Vec sample(CounterRng& rng) const {
        const double r = sample_radius(rng);
        Vec z(dim_, 0.0);
        if (dim_ == 1) {
            z[0] = rng.uniform() < 0.5 ? r : -r;
        } else if (dim_ == 2) {
            const double th = rng.uniform(0.0, 6.283185307179586);
            z[0] = r * std::cos(th);
            z[1] = r * std::sin(th);
        } else {
            const double mu = rng.uniform(-1.0, 1.0);
            const double th = rng.uniform(0.0, 6.283185307179586);
            const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            z[0] = r * s * std::cos(th);
            z[1] = r * s * std::sin(th);
            z[2] = r * mu;
        }
        return z;
    }

  private:
    int dim_;
    std::vector<double> nodes_, cum_, dens_;
    double rate_ = 0.0;
};

// ---------------------------------------------------------------------------
// Path simulator
// ---------------------------------------------------------------------------

struct PathState {
    double t = 0.0;
    Vec x;
    int regime = 1;
    int env_index = 1;  // current envelope ball index n, doubled as needed
};

// Euler-Maruyama for the continuous part, thinning against the envelope for
// jumps with |z| >= eps, uniformization with bound q_bound for switching.
// One CounterRng stream drives one path; streams are (seed, path_index)
// addressed, so ensembles are reproducible independent of scheduling.
class PathSimulator {
  public:
    PathSimulator(const ModelSpec& spec, const SimConfig& cfg) : spec_(spec), cfg_(cfg) {
        cfg_.check();
        if (spec_.has_jumps() && !spec_.jump_envelope)
            throw SimulationError("PathSimulator: jump density without envelope");
    }

    const SimConfig& config() const { return cfg_; }

    // Raise the envelope index by doubling until it covers |x|; returns false
    // when the configured cap is exceeded (the path must then terminate,
    // since (A3) only supplies domination per ball).
    bool ensure_envelope(PathState& s) const {
        if (!spec_.has_jumps()) return true;
        while (norm(s.x) > s.env_index) {
            if (s.env_index > cfg_.max_envelope_index / 2) return false;
            s.env_index *= 2;
        }
        return true;
    }

    // Advance one Euler step of length cfg.dt; returns the event flag.
    int step(PathState& s, CounterRng& rng, long* proposals = nullptr,
             PathRecord* events = nullptr) const {
        const int d = spec_.dim;
        const Vec b = spec_.drift(s.x, s.regime);
        const Mat sg = spec_.diffusion(s.x, s.regime);
        const double dt = cfg_.dt, sq = std::sqrt(dt);
        Vec xn = s.x;
        axpy(dt, b, xn);
        Vec w(d);
        for (auto& v : w) v = rng.normal();
        for (int r = 0; r < d; ++r) {
            double acc = 0.0;
            for (int c = 0; c < d; ++c) acc += sg[r * d + c] * w[c];
            xn[r] += sq * acc;
        }

        bool jumped = false;
        if (spec_.has_jumps()) {
            // compensator of the kept small-jump band eps <= |z| < 1
            if (cfg_.eps < 1.0) {
                const Vec cm = compensator_mean(s.x, s.regime);
                axpy(-dt, cm, xn);
            }
            if (cfg_.small_jump_mode == SmallJumpMode::gaussian) {
                const Mat cov = small_cov(s.x, s.regime);
                add_gaussian_correction(xn, cov, rng, sq);
            }
            // large-jump proposals from the envelope, thinned by the ratio
            const EnvelopeSampler& env = sampler_for(s.env_index);
            const long n_prop = rng.poisson(env.rate() * dt);
            if (proposals) *proposals += n_prop;
            for (long k = 0; k < n_prop; ++k) {
                const Vec z = env.sample(rng);
                const double dens = spec_.jump_density(s.x, s.regime, z);
                const double envd = spec_.jump_envelope(z, s.env_index);
                if (dens > envd * (1.0 + 1e-9) + 1e-300)
                    throw SimulationError("PathSimulator: envelope domination violated at " +
                                          format_point(z, s.regime));
                if (envd > 0.0 && rng.uniform() * envd < dens) {
                    axpy(1.0, z, xn);
                    jumped = true;
                    if (events) events->jump_events.push_back({s.t + dt, z});
                }
            }
        }

        // switching by uniformization: Poisson(q_bound dt) virtual events
        bool switched = false;
        if (spec_.q_bound > 0.0 && spec_.num_regimes > 1) {
            const long n_ev = rng.poisson(spec_.q_bound * dt);
            for (long k = 0; k < n_ev; ++k) {
                const Mat q = spec_.q_matrix(s.x);
                double u = rng.uniform() * spec_.q_bound;
                int next = s.regime;
                for (int j = 1; j <= spec_.num_regimes; ++j) {
                    if (j == s.regime) continue;
                    const double qij = spec_.q_entry(q, s.regime, j);
                    if (u < qij) {
                        next = j;
                        break;
                    }
                    u -= qij;
                }
                if (next != s.regime) {
                    if (events) events->switch_events.push_back({s.t + dt, s.regime, next});
                    s.regime = next;
                    switched = true;
                }
            }
        }

        if (!all_finite(xn))
            throw SimulationError("PathSimulator: non-finite state at t=" + std::to_string(s.t));
        s.x = xn;
        s.t += dt;
        if (jumped && switched) return kEventBoth;
        if (jumped) return kEventJump;
        if (switched) return kEventSwitch;
        return kEventNone;
    }

    // Run until t >= cfg.t_max or stop(state) returns true (checked after
    // each step). The stop callback may be empty.
    PathRecord run(const Vec& x0, int i0, CounterRng& rng,
                   const std::function<bool(const PathState&)>& stop = {}) const {
        if (static_cast<int>(x0.size()) != spec_.dim)
            throw SimulationError("PathSimulator: x0 dimension mismatch");
        if (i0 < 1 || i0 > spec_.num_regimes)
            throw SimulationError("PathSimulator: initial regime out of range");
        PathState s{0.0, x0, i0, 1};
        PathRecord rec;
        long step_index = 0;
        auto record = [&](int flag) {
            if (!cfg_.record_path || step_index % cfg_.record_stride != 0) return;
            rec.times.push_back(s.t);
            rec.states.push_back(s.x);
            rec.regimes.push_back(s.regime);
            rec.event_flags.push_back(flag);
        };
        record(kEventNone);
        rec.terminal_reason = TerminalReason::horizon;
        PathRecord* events = cfg_.record_path ? &rec : nullptr;
        const long n_steps = static_cast<long>(std::ceil(cfg_.t_max / cfg_.dt - 1e-9));
        for (long k = 0; k < n_steps; ++k) {
            if (k >= cfg_.max_steps) {
                rec.terminal_reason = TerminalReason::max_steps;
                break;
            }
            if (!ensure_envelope(s)) {
                rec.terminal_reason = TerminalReason::left_envelope_ball;
                break;
            }
            const int flag = step(s, rng, &rec.proposal_count, events);
            if (flag == kEventJump || flag == kEventBoth) ++rec.jump_count;
            if (flag == kEventSwitch || flag == kEventBoth) ++rec.switch_count;
            ++step_index;
            record(flag);
            if (stop && stop(s)) {
                rec.terminal_reason = TerminalReason::stopped;
                break;
            }
        }
        rec.final_x = s.x;
        rec.final_regime = s.regime;
        rec.final_time = s.t;
        return rec;
    }

    // Envelope proposal rate lambda_n(eps) for ball index n.
    double envelope_rate(int n) const {
        return spec_.has_jumps() ? sampler_for(n).rate() : 0.0;
    }

  private:
    const EnvelopeSampler& sampler_for(int n) const {
        auto it = samplers_.find(n);
        if (it == samplers_.end())
            it = samplers_
                     .emplace(n, std::make_shared<EnvelopeSampler>(spec_, n, cfg_.eps,
                                                                   cfg_.envelope_r_max,
                                                                   cfg_.envelope_table_size))
                     .first;
        return *it->second;
    }

    Vec compensator_mean(const Vec& x, int i) const {
        if (spec_.jump_aux && spec_.jump_aux->compensator_mean)
            return spec_.jump_aux->compensator_mean(x, i, cfg_.eps);
        if (spec_.dim != 1)
            throw SimulationError(
                "PathSimulator: quadrature compensator fallback supports d = 1 only");
        auto f = [&](double r) {
            return r * (spec_.jump_density(x, i, Vec{r}) - spec_.jump_density(x, i, Vec{-r}));
        };
        return Vec{quad::integrate(f, cfg_.eps, 1.0, 1e-9, 1e-14, 400).value};
    }

    Mat small_cov(const Vec& x, int i) const {
        if (spec_.jump_aux && spec_.jump_aux->small_cov)
            return spec_.jump_aux->small_cov(x, i, cfg_.eps);
        if (spec_.dim != 1)
            throw SimulationError(
                "PathSimulator: quadrature small-jump fallback supports d = 1 only");
        auto f = [&](double r) {
            return r * r * (spec_.jump_density(x, i, Vec{r}) + spec_.jump_density(x, i, Vec{-r}));
        };
        return Mat{
            quad::integrate_breaks(f, quad::graded_breaks(0.0, cfg_.eps), 1e-9, 1e-14, 400).value};
    }

    void add_gaussian_correction(Vec& xn, const Mat& cov, CounterRng& rng, double sq) const {
        const int d = spec_.dim;
        // Cholesky of the per-unit-time covariance; scaled by sqrt(dt)
        Mat L(d * d, 0.0);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c <= r; ++c) {
                double s = cov[r * d + c];
                for (int k = 0; k < c; ++k) s -= L[r * d + k] * L[c * d + k];
                if (r == c) {
                    L[r * d + c] = s > 0.0 ? std::sqrt(s) : 0.0;
                } else {
                    L[r * d + c] = L[c * d + c] > 0.0 ? s / L[c * d + c] : 0.0;
                }
            }
        }
        Vec g(d);
        for (auto& v : g) v = rng.normal();
        for (int r = 0; r < d; ++r) {
            double acc = 0.0;
            for (int c = 0; c <= r; ++c) acc += L[r * d + c] * g[c];
            xn[r] += sq * acc;
        }
    }

    ModelSpec spec_;
    SimConfig cfg_;
    mutable std::map<int, std::shared_ptr<EnvelopeSampler>> samplers_;
};

inline PathRecord simulate_path(const ModelSpec& spec, const SimConfig& cfg, const Vec& x0, int i0,
                                std::uint64_t seed, std::uint64_t path_index = 0,
                                const std::function<bool(const PathState&)>& stop = {}) {
    PathSimulator sim(spec, cfg);
    CounterRng rng = CounterRng::stream(seed, path_index);
    return sim.run(x0, i0, rng, stop);
}

// Sequential ensemble; the callback receives each finished path record.
inline void simulate_ensemble(const ModelSpec& spec, const SimConfig& cfg, const Vec& x0, int i0,
                              std::uint64_t seed, long n_paths,
                              const std::function<void(long, const PathRecord&)>& on_path,
                              const std::function<bool(const PathState&)>& stop = {}) {
    PathSimulator sim(spec, cfg);
    for (long p = 0; p < n_paths; ++p) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(p));
        on_path(p, sim.run(x0, i0, rng, stop));
    }
}

}  // namespace rsjd

#endif
