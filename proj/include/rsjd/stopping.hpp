#ifndef RSJD_STOPPING_HPP
#define RSJD_STOPPING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsjd/common.hpp"
#include "rsjd/simulate.hpp"

namespace rsjd {

// Closed ball target, optionally restricted to one regime (0 = any regime).
struct TargetSet {
    Vec center;
    double radius = 1.0;
    int regime = 0;

    bool contains(const PathState& s) const {
        if (regime != 0 && s.regime != regime) return false;
        double d2 = 0.0;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            const double dk = s.x[k] - center[k];
            d2 += dk * dk;
        }
        return d2 <= radius * radius;
    }
};

struct HittingStats {
    long n_paths = 0;
    long n_hit = 0;
    double horizon = 0.0;
    double hit_fraction = 0.0;
    // censored moments of sigma ^ horizon (well-defined without recurrence)
    double censored_mean = 0.0;
    double censored_se = 0.0;
    // conditional mean over hitting paths only
    double hit_mean = 0.0;
    double hit_se = 0.0;
    // survival curve: fraction of paths with sigma > t on a uniform grid
    std::vector<double> survival_times;
    std::vector<double> survival_fraction;
    // distance from the target among paths that never hit, at the horizon
    double escape_distance_median = 0.0;
    double escape_distance_max = 0.0;
    long n_anomalous = 0;  // exit estimation only: paths stopped by caps
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (idx - lo) * (v[hi] - v[lo]);
}

inline void mean_se(const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    se = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= v.size();
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (v.size() - 1) / v.size());
}

}  // namespace detail

// Monte Carlo estimate of the hitting time of `target` started from (x0, i0),
// censored at cfg.t_max.
inline HittingStats estimate_hitting(const ModelSpec& spec, const SimConfig& cfg, const Vec& x0,
                                     int i0, const TargetSet& target, long n_paths,
                                     std::uint64_t seed, int survival_points = 64) {
    if (target.center.size() != static_cast<std::size_t>(spec.dim))
        throw SimulationError("estimate_hitting: target dimension mismatch");
    SimConfig run_cfg = cfg;
    run_cfg.record_path = false;
    PathSimulator sim(spec, run_cfg);

    HittingStats st;
    st.n_paths = n_paths;
    st.horizon = cfg.t_max;
    std::vector<double> censored, hit_times, escape;
    censored.reserve(n_paths);
    auto stop = [&](const PathState& s) { return target.contains(s); };
    for (long p = 0; p < n_paths; ++p) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(p));
        PathRecord rec = sim.run(x0, i0, rng, stop);
        PathState fin{rec.final_time, rec.final_x, rec.final_regime};
        const bool hit = target.contains(fin);
        if (hit) {
            ++st.n_hit;
            hit_times.push_back(rec.final_time);
            censored.push_back(rec.final_time);
        } else {
            censored.push_back(cfg.t_max);
            escape.push_back(norm(rec.final_x - target.center));
        }
    }
    st.hit_fraction = double(st.n_hit) / double(n_paths);
    detail::mean_se(censored, st.censored_mean, st.censored_se);
    detail::mean_se(hit_times, st.hit_mean, st.hit_se);
    if (!escape.empty()) {
        st.escape_distance_median = detail::percentile(escape, 0.5);
        st.escape_distance_max = *std::max_element(escape.begin(), escape.end());
    }
    std::sort(hit_times.begin(), hit_times.end());
    for (int k = 0; k <= survival_points; ++k) {
        const double t = cfg.t_max * k / survival_points;
        const auto n_le =
            std::upper_bound(hit_times.begin(), hit_times.end(), t) - hit_times.begin();
        st.survival_times.push_back(t);
        st.survival_fraction.push_back(1.0 - double(n_le) / double(n_paths));
    }
    return st;
}

// Exit time of the open ball B(0, domain_radius): first step with |X| >= R.
// Paths are never censored at cfg.t_max; they run until they exit or exhaust
// cfg.max_steps (finiteness is expected under ellipticity, so an unexited
// path is counted as numerically anomalous rather than silently dropped).
// A start on or outside the boundary exits at time 0 by convention.
inline HittingStats estimate_exit(const ModelSpec& spec, const SimConfig& cfg, const Vec& x0,
                                  int i0, double domain_radius, long n_paths, std::uint64_t seed,
                                  int survival_points = 64) {
    SimConfig run_cfg = cfg;
    run_cfg.record_path = false;
    PathSimulator sim(spec, run_cfg);
    HittingStats st;
    st.n_paths = n_paths;
    st.horizon = cfg.t_max;
    std::vector<double> hit_times;
    for (long p = 0; p < n_paths; ++p) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(p));
        PathState s{0.0, x0, i0, 1};
        long steps = 0;
        bool anomalous = false;
        while (norm(s.x) < domain_radius) {
            if (steps >= run_cfg.max_steps || !sim.ensure_envelope(s)) {
                anomalous = true;
                break;
            }
            sim.step(s, rng);
            ++steps;
        }
        if (anomalous) {
            ++st.n_anomalous;
            continue;
        }
        ++st.n_hit;
        hit_times.push_back(s.t);
    }
    st.hit_fraction = double(st.n_hit) / double(n_paths);
    detail::mean_se(hit_times, st.hit_mean, st.hit_se);
    st.censored_mean = st.hit_mean;
    st.censored_se = st.hit_se;
    std::vector<double> sorted = hit_times;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k <= survival_points; ++k) {
        const double t = cfg.t_max * k / survival_points;
        const auto n_le = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        st.survival_times.push_back(t);
        st.survival_fraction.push_back(1.0 - double(n_le) / double(n_paths));
    }
    return st;
}

enum class Verdict {
    positive_recurrent_evidence,
    recurrent_evidence,
    transience_suspected,
    inconclusive
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::positive_recurrent_evidence: return "positive-recurrent-evidence";
        case Verdict::recurrent_evidence: return "recurrent-evidence";
        case Verdict::transience_suspected: return "transience-suspected";
        default: return "inconclusive";
    }
}

struct ClassifyCell {
    Vec start;
    int start_regime = 1;
    TargetSet target;
    std::string kind;  // "cylinder" or "slice"
    std::vector<HittingStats> per_horizon;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

struct Classification {
    Verdict verdict = Verdict::inconclusive;
    std::vector<ClassifyCell> cells;
    std::string note;
};

struct ClassifyParams {
    std::vector<double> horizons = {4.0, 8.0, 16.0, 32.0};
    double hit_thresh = 0.999;
    double mean_stability = 0.05;
    double plateau_level = 0.9;
    int slice_regime = 1;
};

namespace detail {

// One (start, target) cell: run the horizon ladder and apply the heuristic.
// Strong positive-recurrence evidence needs a hit fraction >= hit_thresh at
// the final horizon together with a censored mean E[sigma ^ h] that has
// stabilized across the last doubling beyond its Monte Carlo noise.
// Transience evidence needs the hit fraction to plateau below plateau_level
// while the median escape distance keeps growing.
inline void classify_one(const ModelSpec& spec, const SimConfig& base_cfg, long n_paths,
                         std::uint64_t seed, const ClassifyParams& prm, ClassifyCell& cell) {
    for (std::size_t h = 0; h < prm.horizons.size(); ++h) {
        SimConfig cfg = base_cfg;
        cfg.t_max = prm.horizons[h];
        // fresh seed block per horizon keeps the ladder cells independent
        cell.per_horizon.push_back(estimate_hitting(spec, cfg, cell.start, cell.start_regime,
                                                    cell.target, n_paths, seed + 1000003ull * h));
    }
    const auto& last = cell.per_horizon.back();
    const auto& prev = cell.per_horizon[cell.per_horizon.size() - 2];
    const double mean_noise =
        3.0 * std::sqrt(last.censored_se * last.censored_se + prev.censored_se * prev.censored_se);
    const double mean_change =
        std::max(0.0, std::abs(last.censored_mean - prev.censored_mean) - mean_noise) /
        std::max(prev.censored_mean, 1e-12);
    const double frac_change = last.hit_fraction - prev.hit_fraction;
    const double p = last.hit_fraction;
    const double frac_tol =
        0.005 + 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-6) / double(n_paths));

    if (last.hit_fraction >= prm.hit_thresh) {
        if (mean_change <= prm.mean_stability) {
            cell.verdict = Verdict::positive_recurrent_evidence;
            cell.note = "hit fraction " + std::to_string(last.hit_fraction) +
                        ", censored mean drift " + std::to_string(mean_change);
        } else {
            cell.verdict = Verdict::recurrent_evidence;
            cell.note = "hit fraction " + std::to_string(last.hit_fraction) +
                        " but censored mean still drifting (" + std::to_string(mean_change) + ")";
        }
    } else if (last.hit_fraction < prm.plateau_level && frac_change <= frac_tol &&
               last.escape_distance_median >= prev.escape_distance_median) {
        cell.verdict = Verdict::transience_suspected;
        cell.note = "hit fraction plateau at " + std::to_string(last.hit_fraction) +
                    ", escape median " + std::to_string(last.escape_distance_median);
    } else {
        cell.verdict = Verdict::inconclusive;
        cell.note = "no stable pattern across horizons";
    }
}

}  // namespace detail

// Recurrence classification with the cross-checks of the domain- and
// component-independence theorems: each probe start is tested against every
// target domain, both as a cylinder (any regime) and as a regime slice.
// The combined verdict is the common cell verdict; cells that disagree make
// the result inconclusive with the conflicting pair named.
inline Classification classify(const ModelSpec& spec, const SimConfig& base_cfg,
                               const std::vector<std::pair<Vec, int>>& probe_starts,
                               const std::vector<TargetSet>& target_domains, long n_paths,
                               std::uint64_t seed, const ClassifyParams& prm = {}) {
    if (prm.horizons.size() < 2) throw SimulationError("classify: need at least two horizons");
    if (probe_starts.empty()) throw SimulationError("classify: need at least one probe start");
    if (target_domains.empty()) throw SimulationError("classify: need at least one target domain");
    Classification out;
    std::uint64_t block = 0;
    for (const auto& [x0, i0] : probe_starts) {
        for (const auto& dom : target_domains) {
            for (int slice = 0; slice < (spec.num_regimes > 1 ? 2 : 1); ++slice) {
                ClassifyCell cell;
                cell.start = x0;
                cell.start_regime = i0;
                cell.target = dom;
                cell.target.regime = slice ? prm.slice_regime : 0;
                cell.kind = slice ? "slice" : "cylinder";
                detail::classify_one(spec, base_cfg, n_paths, seed + 7778777ull * (block++), prm,
                                     cell);
                out.cells.push_back(std::move(cell));
            }
        }
    }
    out.verdict = out.cells.front().verdict;
    out.note = out.cells.front().note;
    for (std::size_t k = 1; k < out.cells.size(); ++k) {
        if (out.cells[k].verdict != out.verdict) {
            out.verdict = Verdict::inconclusive;
            out.note = "cell 0 (" + out.cells[0].kind + ") says " +
                       to_string(out.cells[0].verdict) + " but cell " + std::to_string(k) + " (" +
                       out.cells[k].kind + ") says " + to_string(out.cells[k].verdict);
            break;
        }
    }
    return out;
}

}  // namespace rsjd

#endif
