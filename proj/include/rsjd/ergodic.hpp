#ifndef RSJD_ERGODIC_HPP
#define RSJD_ERGODIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsjd/common.hpp"
#include "rsjd/simulate.hpp"

namespace rsjd {

// Regular histogram on [-extent, extent]^d (d <= 2) per regime, with one
// overflow bin per regime for states outside the box.
struct BinGrid {
    int dim = 1;
    int num_regimes = 1;
    int bins_per_axis = 64;
    double extent = 1.0;

    BinGrid(int d, int m, double ext, int bins = 64)
        : dim(d), num_regimes(m), bins_per_axis(bins), extent(ext) {
        if (d < 1 || d > 2) throw SimulationError("BinGrid: supports d <= 2 only");
        if (bins < 2 || ext <= 0.0) throw SimulationError("BinGrid: malformed grid");
    }

    int cells_per_regime() const {
        int c = bins_per_axis;
        if (dim == 2) c *= bins_per_axis;
        return c + 1;  // + overflow
    }
    int size() const { return cells_per_regime() * num_regimes; }
    int overflow_cell() const { return cells_per_regime() - 1; }

    // flat index of (x, regime); overflow cell when x is outside the box
    int index(const Vec& x, int regime) const {
        int cell = 0, stride = 1;
        bool inside = true;
        for (int k = 0; k < dim; ++k) {
            const double u = (x[k] + extent) / (2.0 * extent);
            if (u < 0.0 || u >= 1.0) {
                inside = false;
                break;
            }
            cell += stride * static_cast<int>(u * bins_per_axis);
            stride *= bins_per_axis;
        }
        if (!inside) cell = overflow_cell();
        return (regime - 1) * cells_per_regime() + cell;
    }

    // center coordinates of a (non-overflow) cell
    Vec center(int cell) const {
        Vec c(dim, 0.0);
        const double w = 2.0 * extent / bins_per_axis;
        for (int k = 0; k < dim; ++k) {
            const int idx = (k == 0) ? cell % bins_per_axis : cell / bins_per_axis;
            c[k] = -extent + (idx + 0.5) * w;
        }
        return c;
    }
};

struct CycleConfig {
    double d_radius = 2.0;      // exit domain D = B(0, d_radius)
    double e_radius = 1.0;      // return set E = closed ball B(0, e_radius)
    int return_regime = 1;      // fixed regime l of the regeneration set
    long n_cycles = 200;
    long warmup_cycles = 10;    // completed cycles discarded before recording
    double max_cycle_time = 1e4;  // safety cap per cycle
    int bins_per_axis = 64;

    void check(const ModelSpec& spec, const SimConfig& sim) const {
        if (!(e_radius > 0.0 && e_radius < d_radius))
            throw SimulationError("CycleConfig: need 0 < e_radius < d_radius");
        if (return_regime < 1 || return_regime > spec.num_regimes)
            throw SimulationError("CycleConfig: return_regime out of range");
        if (n_cycles < 2) throw SimulationError("CycleConfig: need at least two cycles");
        // the E-D gap must dominate a typical diffusion step or the exit and
        // return times collapse to single steps
        double tr = 0.0;
        const Mat a = spec.a_matrix(Vec(spec.dim, 0.0), return_regime);
        for (int k = 0; k < spec.dim; ++k) tr += a[k * spec.dim + k];
        if (d_radius - e_radius <= 2.0 * std::sqrt(sim.dt * tr))
            throw SimulationError(
                "CycleConfig: d_radius - e_radius must exceed twice the typical step length");
    }
};

struct CycleStats {
    std::vector<double> lengths;  // cycle durations
    std::vector<std::vector<double>> occupation;  // per cycle, per grid cell
    std::vector<Vec> embedded;  // cycle start points (the embedded chain)
    bool aborted = false;       // a cycle hit max_cycle_time; ensemble is partial
    double total_time = 0.0;
    long total_steps = 0;
};

// Simulate n_cycles regeneration cycles: each cycle runs from an entry of
// E x {l} through the next exit of D and back to E x {l}. The path starts at
// x0 and the leading segment before the first regeneration is discarded.
inline CycleStats run_cycles(const ModelSpec& spec, const SimConfig& sim_cfg,
                             const CycleConfig& cyc, const BinGrid& grid, const Vec& x0, int i0,
                             std::uint64_t seed) {
    cyc.check(spec, sim_cfg);
    SimConfig cfg = sim_cfg;
    cfg.record_path = false;
    PathSimulator sim(spec, cfg);
    CounterRng rng = CounterRng::stream(seed, 0);
    PathState s{0.0, x0, i0};

    auto in_return_set = [&](const PathState& st) {
        return norm(st.x) <= cyc.e_radius && st.regime == cyc.return_regime;
    };
    auto outside_domain = [&](const PathState& st) { return norm(st.x) >= cyc.d_radius; };

    CycleStats out;
    // warm up to the first regeneration time
    double warm = 0.0;
    auto guarded_step = [&]() {
        if (!sim.ensure_envelope(s))
            throw SimulationError("run_cycles: path left the largest envelope ball");
        sim.step(s, rng);
    };
    while (!in_return_set(s)) {
        guarded_step();
        warm += cfg.dt;
        if (warm > cyc.max_cycle_time)
            throw SimulationError("run_cycles: no entry into the return set within the time cap");
    }

    out.lengths.reserve(cyc.n_cycles);
    for (long c = 0; c < cyc.warmup_cycles + cyc.n_cycles; ++c) {
        const bool recording = c >= cyc.warmup_cycles;
        std::vector<double> occ(recording ? grid.size() : 0, 0.0);
        const Vec cycle_start = s.x;
        double length = 0.0;
        bool exited = false;
        bool truncated = false;
        while (true) {
            if (recording) occ[grid.index(s.x, s.regime)] += cfg.dt;
            guarded_step();
            length += cfg.dt;
            ++out.total_steps;
            if (!exited && outside_domain(s)) exited = true;
            if (exited && in_return_set(s)) break;
            if (length > cyc.max_cycle_time) {
                truncated = true;
                break;
            }
        }
        if (truncated) {
            // return the partial ensemble and let the caller decide
            out.aborted = true;
            break;
        }
        if (!recording) continue;
        out.lengths.push_back(length);
        out.occupation.push_back(std::move(occ));
        out.embedded.push_back(cycle_start);
        out.total_time += length;
    }
    return out;
}

struct InvariantEstimate {
    BinGrid grid;
    std::vector<double> weight;  // occupation fraction per cell, sums to 1
    std::vector<double> se;      // regenerative bootstrap standard error
    double mean_cycle_length = 0.0;
    double cycle_length_se = 0.0;
    long n_cycles = 0;
    bool aborted = false;  // cycle collection stopped early at the time cap
    double total_time = 0.0;

    double regime_mass(int regime) const {
        double m = 0.0;
        const int cpr = grid.cells_per_regime();
        for (int c = 0; c < cpr; ++c) m += weight[(regime - 1) * cpr + c];
        return m;
    }
};

// Ratio estimator nu(A x {i}) = sum_n occ_n(A, i) / sum_n len_n with
// standard errors from resampling whole cycles (the regenerative bootstrap:
// cycles are iid, so resampling preserves the dependence within each cycle).
inline InvariantEstimate estimate_invariant(const ModelSpec& spec, const SimConfig& sim_cfg,
                                            const CycleConfig& cyc, const Vec& x0, int i0,
                                            std::uint64_t seed, int bootstrap_reps = 200) {
    BinGrid grid(spec.dim, spec.num_regimes, 4.0 * cyc.d_radius, cyc.bins_per_axis);
    CycleStats st = run_cycles(spec, sim_cfg, cyc, grid, x0, i0, seed);
    const long n = static_cast<long>(st.lengths.size());
    if (n < 2)
        throw SimulationError("estimate_invariant: fewer than two completed cycles" +
                              std::string(st.aborted ? " (collection hit the time cap)" : ""));

    InvariantEstimate est{grid};
    est.n_cycles = n;
    est.aborted = st.aborted;
    est.total_time = st.total_time;

    std::vector<double> occ_sum(grid.size(), 0.0);
    double len_sum = 0.0;
    for (long c = 0; c < n; ++c) {
        len_sum += st.lengths[c];
        for (int k = 0; k < grid.size(); ++k) occ_sum[k] += st.occupation[c][k];
    }
    est.weight.resize(grid.size());
    for (int k = 0; k < grid.size(); ++k) est.weight[k] = occ_sum[k] / len_sum;
    est.mean_cycle_length = len_sum / n;
    {
        double ss = 0.0;
        for (double l : st.lengths) ss += (l - est.mean_cycle_length) * (l - est.mean_cycle_length);
        est.cycle_length_se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    }

    // bootstrap over cycles
    est.se.assign(grid.size(), 0.0);
    std::vector<double> mean_acc(grid.size(), 0.0), sq_acc(grid.size(), 0.0);
    CounterRng brng = CounterRng::stream(seed, 0x626f6f74ull);
    std::vector<double> rocc(grid.size());
    for (int rep = 0; rep < bootstrap_reps; ++rep) {
        std::fill(rocc.begin(), rocc.end(), 0.0);
        double rlen = 0.0;
        for (long c = 0; c < n; ++c) {
            const long pick = static_cast<long>(brng.uniform() * n);
            const long idx = pick >= n ? n - 1 : pick;
            rlen += st.lengths[idx];
            for (int k = 0; k < grid.size(); ++k) rocc[k] += st.occupation[idx][k];
        }
        for (int k = 0; k < grid.size(); ++k) {
            const double w = rocc[k] / rlen;
            mean_acc[k] += w;
            sq_acc[k] += w * w;
        }
    }
    for (int k = 0; k < grid.size(); ++k) {
        const double m = mean_acc[k] / bootstrap_reps;
        const double var = std::max(0.0, sq_acc[k] / bootstrap_reps - m * m);
        est.se[k] = std::sqrt(var * bootstrap_reps / std::max(1, bootstrap_reps - 1));
    }
    return est;
}

struct TimeAverage {
    double value = 0.0;
    double se = 0.0;  // across-path standard error
    double total_time = 0.0;
};

// Ensemble estimate of the long-run time average (1/T) int_0^T f(X, Lambda) dt
// over n_paths independent paths, with the standard error taken across paths.
inline TimeAverage time_average(const ModelSpec& spec, const SimConfig& sim_cfg, const Vec& x0,
                                int i0, const std::function<double(const Vec&, int)>& f,
                                std::uint64_t seed, long n_paths = 16) {
    if (n_paths < 1) throw SimulationError("time_average: need at least one path");
    SimConfig cfg = sim_cfg;
    cfg.record_path = false;
    PathSimulator sim(spec, cfg);
    const long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt));
    std::vector<double> path_means;
    for (long p = 0; p < n_paths; ++p) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(p));
        PathState s{0.0, x0, i0, 1};
        double acc = 0.0;
        for (long k = 0; k < n_steps; ++k) {
            acc += f(s.x, s.regime);
            if (!sim.ensure_envelope(s))
                throw SimulationError("time_average: path left the largest envelope ball");
            sim.step(s, rng);
        }
        path_means.push_back(acc / n_steps);
    }
    TimeAverage out;
    out.total_time = n_steps * cfg.dt;
    double m = 0.0;
    for (double v : path_means) m += v;
    m /= n_paths;
    out.value = m;
    double ss = 0.0;
    for (double v : path_means) ss += (v - m) * (v - m);
    out.se = n_paths > 1 ? std::sqrt(ss / (n_paths - 1) / n_paths) : 0.0;
    return out;
}

enum class PositivityStatus { positive, not_positive, not_covered };

inline const char* to_string(PositivityStatus s) {
    switch (s) {
        case PositivityStatus::positive: return "positive";
        case PositivityStatus::not_positive: return "not-positive";
        default: return "not-covered";
    }
}

struct PositivityResult {
    PositivityStatus status = PositivityStatus::not_covered;
    double mass = 0.0;
    double se = 0.0;
};

// Does the estimated invariant measure put significantly positive mass on
// the box [lo, hi] x {regime}? Boxes outside the histogram support report
// not-covered rather than a spurious zero.
inline PositivityResult positivity_check(const InvariantEstimate& est, const Vec& lo,
                                         const Vec& hi, int regime, double z = 3.0) {
    PositivityResult out;
    const BinGrid& g = est.grid;
    for (int k = 0; k < g.dim; ++k)
        if (lo[k] < -g.extent || hi[k] > g.extent) return out;  // not covered
    const int cpr = g.cells_per_regime();
    double mass = 0.0, var = 0.0;
    for (int cell = 0; cell < cpr - 1; ++cell) {
        const Vec c = g.center(cell);
        bool in = true;
        const double half = g.extent / g.bins_per_axis;
        for (int k = 0; k < g.dim; ++k)
            if (c[k] + half <= lo[k] || c[k] - half >= hi[k]) in = false;
        if (!in) continue;
        const int flat = (regime - 1) * cpr + cell;
        mass += est.weight[flat];
        var += est.se[flat] * est.se[flat];
    }
    out.mass = mass;
    out.se = std::sqrt(var);
    out.status = mass > z * out.se && mass > 0.0 ? PositivityStatus::positive
                                                 : PositivityStatus::not_positive;
    return out;
}

}  // namespace rsjd

#endif
