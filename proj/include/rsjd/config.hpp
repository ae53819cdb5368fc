#ifndef RSJD_CONFIG_HPP
#define RSJD_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rsjd/builtin_models.hpp"
#include "rsjd/common.hpp"
#include "rsjd/ergodic.hpp"
#include "rsjd/expr.hpp"
#include "rsjd/generator.hpp"
#include "rsjd/model.hpp"
#include "rsjd/simulate.hpp"
#include "rsjd/stopping.hpp"

namespace rsjd {

// ---------------------------------------------------------------------------
// Strict INI reader: unknown sections or keys are errors, as are duplicates.
// ---------------------------------------------------------------------------

class Ini {
  public:
    static Ini parse(std::istream& in) {
        Ini ini;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty())
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": empty section name");
                ini.data_[section];
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            const std::string key = trim(t.substr(0, eq));
            const std::string val = trim(t.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            auto& sec = ini.data_[section];
            if (sec.count(key))
                throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                                  key + "' in section [" + section + "]");
            sec[key] = val;
        }
        return ini;
    }

    static Ini parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    bool has_section(const std::string& s) const { return data_.count(s) != 0; }
    bool has(const std::string& s, const std::string& k) const {
        auto it = data_.find(s);
        return it != data_.end() && it->second.count(k);
    }

    std::string get(const std::string& s, const std::string& k) {
        auto it = data_.find(s);
        if (it == data_.end() || !it->second.count(k))
            throw ConfigError("config: missing required key '" + k + "' in section [" + s + "]");
        consumed_.insert(s + "\n" + k);
        return it->second.at(k);
    }

    std::string get_or(const std::string& s, const std::string& k, const std::string& fb) {
        if (!has(s, k)) return fb;
        return get(s, k);
    }

    double get_num(const std::string& s, const std::string& k) { return to_num(s, k, get(s, k)); }
    double get_num_or(const std::string& s, const std::string& k, double fb) {
        if (!has(s, k)) return fb;
        return get_num(s, k);
    }
    long get_int_or(const std::string& s, const std::string& k, long fb) {
        if (!has(s, k)) return fb;
        const double v = get_num(s, k);
        const long l = static_cast<long>(v);
        if (static_cast<double>(l) != v)
            throw ConfigError("config: key '" + k + "' in [" + s + "] must be an integer");
        return l;
    }

    std::vector<double> get_list_or(const std::string& s, const std::string& k,
                                    std::vector<double> fb) {
        if (!has(s, k)) return fb;
        std::vector<double> out;
        std::stringstream ss(get(s, k));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_num(s, k, trim(item)));
        if (out.empty())
            throw ConfigError("config: key '" + k + "' in [" + s + "] must be a list of numbers");
        return out;
    }

    // every key must have been consumed by the loader
    void check_consumed() const {
        for (const auto& [sec, kv] : data_)
            for (const auto& [key, val] : kv)
                if (!consumed_.count(sec + "\n" + key))
                    throw ConfigError("config: unknown key '" + key + "' in section [" +
                                      (sec.empty() ? "<top>" : sec) + "]");
    }

    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

  private:
    double to_num(const std::string& s, const std::string& k, const std::string& v) const {
        std::size_t used = 0;
        double d;
        try {
            d = std::stod(v, &used);
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + k + "' in [" + s + "] is not a number: '" + v +
                              "'");
        }
        if (used != v.size())
            throw ConfigError("config: key '" + k + "' in [" + s + "] has trailing junk: '" + v +
                              "'");
        return d;
    }

    std::map<std::string, std::map<std::string, std::string>> data_;
    std::set<std::string> consumed_;
};

// ---------------------------------------------------------------------------
// Run configuration assembled from the INI file
// ---------------------------------------------------------------------------

struct HittingOptions {
    TargetSet target;
    long paths = 2000;
};

struct ClassifyOptions {
    TargetSet target;
    double second_radius = 0.0;  // 0 picks 1.5x the first domain's radius
    long paths = 2000;
    ClassifyParams params;
};

struct GeneratorEvalOptions {
    std::string function = "power-radial";
    std::map<std::string, double> fn_params;
    std::vector<Vec> points;
    std::vector<int> regimes;  // empty = all
};

struct LyapunovOptions {
    std::string criterion = "c1";  // c1 | c2 | e51 | e52 | exit-witness
    std::string function = "power-radial";
    std::map<std::string, double> fn_params;
    double r_min = 1.0, r_max = 100.0;
    int radii = 32, directions = 16;
    double e51_delta = 0.5;
    std::vector<double> e52_radii = {2, 4, 8, 16, 32, 64};
    double witness_domain_radius = 2.0;
};

struct RunConfig {
    int format_version = 1;
    std::string command;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    ModelSpec model;
    QuadratureConfig quad;
    SimConfig sim;
    CycleConfig cycles;
    int bootstrap_reps = 200;
    Vec x0;
    int regime0 = 1;
    long sim_paths = 1;
    HittingOptions hitting;
    ClassifyOptions classify_opts;
    GeneratorEvalOptions generator_eval;
    LyapunovOptions lyapunov;
    double validate_box_radius = 10.0;
    int validate_samples = 400;
};

namespace detail {

// Expression-defined models are restricted to d = 1: each coefficient is a
// scalar expression in x1 (and z1, i, n where it applies).
inline ModelSpec expression_model(Ini& ini) {
    ModelSpec spec;
    spec.dim = static_cast<int>(ini.get_num_or("model", "dim", 1));
    if (spec.dim != 1)
        throw ConfigError("config: expression models support dim = 1 only");
    spec.num_regimes = static_cast<int>(ini.get_num_or("model", "num_regimes", 1));
    if (spec.num_regimes < 1) throw ConfigError("config: num_regimes must be >= 1");
    spec.name = "expression";

    auto compile = [&](const std::string& key) {
        const std::string text = ini.get("model", key);
        try {
            return Expr::parse(text);
        } catch (const ConfigError& e) {
            throw ConfigError("config: key '" + key + "': " + e.what());
        }
    };

    Expr drift = compile("drift"), sigma = compile("diffusion");
    spec.drift = [drift](const Vec& x, int i) {
        ExprContext c;
        c.x = &x;
        c.regime = i;
        return Vec{drift.eval(c)};
    };
    spec.diffusion = [sigma](const Vec& x, int i) {
        ExprContext c;
        c.x = &x;
        c.regime = i;
        return Mat{sigma.eval(c)};
    };

    const bool has_density = ini.has("model", "jump_density");
    const bool has_envelope = ini.has("model", "jump_envelope");
    if (has_density != has_envelope)
        throw ConfigError("config: jump_density and jump_envelope must be given together");
    if (has_density) {
        Expr dens = compile("jump_density"), env = compile("jump_envelope");
        if (env.uses_x())
            throw ConfigError("config: jump_envelope may depend on z and n only");
        spec.jump_density = [dens](const Vec& x, int i, const Vec& z) {
            ExprContext c;
            c.x = &x;
            c.z = &z;
            c.regime = i;
            return dens.eval(c);
        };
        spec.jump_envelope = [env](const Vec& z, int n) {
            ExprContext c;
            c.z = &z;
            c.n = n;
            return env.eval(c);
        };
    }

    if (spec.num_regimes == 1) {
        spec.q_matrix = [](const Vec&) { return Mat{0.0}; };
        spec.q_bound = ini.get_num_or("model", "q_bound", 0.0);
    } else {
        const int m = spec.num_regimes;
        std::vector<double> q = ini.get_list_or("model", "q_matrix", {});
        if (static_cast<int>(q.size()) != m * m)
            throw ConfigError("config: q_matrix must list " + std::to_string(m * m) +
                              " entries row by row");
        Mat qm(q.begin(), q.end());
        spec.q_matrix = [qm](const Vec&) { return qm; };
        double qb = 0.0;
        for (int i = 0; i < m; ++i) qb = std::max(qb, -qm[i * m + i]);
        spec.q_bound = ini.get_num_or("model", "q_bound", qb);
    }
    return spec;
}

inline ModelSpec model_from_ini(Ini& ini) {
    const std::string type = ini.get_or("model", "type", "builtin");
    if (type == "expression") return expression_model(ini);
    if (type != "builtin")
        throw ConfigError("config: model type must be 'builtin' or 'expression'");
    const std::string family = ini.get("model", "family");
    std::map<std::string, double> params;
    for (const std::string key : {"theta", "alpha", "c", "c0", "c1"})
        if (ini.has("model", key)) params[key] = ini.get_num("model", key);
    return builtin_model(family, params);
}

inline std::vector<Vec> parse_points(const std::string& text, int dim) {
    std::vector<Vec> pts;
    std::stringstream ss(text);
    std::string group;
    while (std::getline(ss, group, ';')) {
        Vec p;
        std::stringstream gs(group);
        std::string item;
        while (std::getline(gs, item, ',')) p.push_back(std::stod(Ini::trim(item)));
        if (static_cast<int>(p.size()) != dim)
            throw ConfigError("config: point '" + group + "' has wrong dimension");
        pts.push_back(std::move(p));
    }
    if (pts.empty()) throw ConfigError("config: empty point list");
    return pts;
}

}  // namespace detail

inline RunConfig load_run_config(Ini ini) {
    RunConfig rc;
    rc.format_version = static_cast<int>(ini.get_num("", "format_version"));
    if (rc.format_version != 1)
        throw ConfigError("config: unsupported format_version " +
                          std::to_string(rc.format_version));
    rc.command = ini.get("", "command");
    const std::set<std::string> commands = {"validate",  "generator-eval", "lyapunov",
                                            "simulate",  "hitting",        "classify",
                                            "invariant"};
    if (!commands.count(rc.command))
        throw ConfigError("config: unknown command '" + rc.command + "'");
    rc.seed = static_cast<std::uint64_t>(ini.get_num_or("", "seed", 1.0));
    rc.out_dir = ini.get_or("", "out_dir", ".");

    rc.model = detail::model_from_ini(ini);

    rc.quad.small_jump_radius = ini.get_num_or("quad", "small_jump_radius", 1.0);
    rc.quad.outer_radius = ini.get_num_or("quad", "outer_radius", 1e3);
    rc.quad.rel_tol = ini.get_num_or("quad", "rel_tol", 1e-8);
    rc.quad.max_subdivisions = static_cast<int>(ini.get_int_or("quad", "max_subdivisions", 4000));
    rc.quad.angular_order = static_cast<int>(ini.get_int_or("quad", "angular_order", 16));
    rc.quad.check();

    rc.sim.dt = ini.get_num_or("sim", "dt", 1e-3);
    rc.sim.t_max = ini.get_num_or("sim", "t_max", 10.0);
    rc.sim.eps = ini.get_num_or("sim", "eps", 0.1);
    const std::string mode = ini.get_or("sim", "small_jump_mode", "gaussian");
    if (mode == "gaussian")
        rc.sim.small_jump_mode = SmallJumpMode::gaussian;
    else if (mode == "truncate")
        rc.sim.small_jump_mode = SmallJumpMode::truncate;
    else
        throw ConfigError("config: small_jump_mode must be 'gaussian' or 'truncate'");
    rc.sim.record_stride = static_cast<int>(ini.get_int_or("sim", "record_stride", 1));
    rc.sim.check();
    rc.sim_paths = ini.get_int_or("sim", "paths", 1);
    if (rc.sim_paths < 1) throw ConfigError("config: paths must be >= 1");

    {
        std::vector<double> x0 = ini.get_list_or("sim", "x0", std::vector<double>(rc.model.dim, 0.0));
        if (static_cast<int>(x0.size()) != rc.model.dim)
            throw ConfigError("config: x0 must have " + std::to_string(rc.model.dim) +
                              " components");
        rc.x0 = Vec(x0.begin(), x0.end());
        rc.regime0 = static_cast<int>(ini.get_int_or("sim", "regime0", 1));
        if (rc.regime0 < 1 || rc.regime0 > rc.model.num_regimes)
            throw ConfigError("config: regime0 out of range");
    }

    rc.validate_box_radius = ini.get_num_or("validate", "box_radius", 10.0);
    rc.validate_samples = static_cast<int>(ini.get_int_or("validate", "samples", 400));

    if (ini.has_section("cycles") || rc.command == "invariant") {
        rc.cycles.d_radius = ini.get_num_or("cycles", "d_radius", 2.0);
        rc.cycles.e_radius = ini.get_num_or("cycles", "e_radius", 1.0);
        rc.cycles.return_regime = static_cast<int>(ini.get_int_or("cycles", "return_regime", 1));
        rc.cycles.n_cycles = ini.get_int_or("cycles", "n_cycles", 200);
        rc.cycles.max_cycle_time = ini.get_num_or("cycles", "max_cycle_time", 1e4);
        rc.cycles.bins_per_axis = static_cast<int>(ini.get_int_or("cycles", "bins_per_axis", 64));
        rc.bootstrap_reps = static_cast<int>(ini.get_int_or("cycles", "bootstrap_reps", 200));
        rc.cycles.check(rc.model, rc.sim);
    }

    if (ini.has_section("hitting") || rc.command == "hitting" || rc.command == "classify") {
        std::vector<double> center = ini.get_list_or("hitting", "target_center",
                                                     std::vector<double>(rc.model.dim, 0.0));
        if (static_cast<int>(center.size()) != rc.model.dim)
            throw ConfigError("config: target_center has wrong dimension");
        TargetSet tgt;
        tgt.center = Vec(center.begin(), center.end());
        tgt.radius = ini.get_num_or("hitting", "target_radius", 1.0);
        tgt.regime = static_cast<int>(ini.get_int_or("hitting", "target_regime", 0));
        if (tgt.radius <= 0.0) throw ConfigError("config: target_radius must be positive");
        if (tgt.regime < 0 || tgt.regime > rc.model.num_regimes)
            throw ConfigError("config: target_regime out of range");
        rc.hitting.target = tgt;
        rc.hitting.paths = ini.get_int_or("hitting", "paths", 2000);
        rc.classify_opts.target = tgt;
    }

    if (ini.has_section("classify") || rc.command == "classify") {
        auto& co = rc.classify_opts;
        co.paths = ini.get_int_or("classify", "paths", 2000);
        co.second_radius = ini.get_num_or("classify", "second_radius", 0.0);
        co.params.horizons = ini.get_list_or("classify", "horizons", {4.0, 8.0, 16.0, 32.0});
        co.params.hit_thresh = ini.get_num_or("classify", "hit_thresh", 0.999);
        co.params.mean_stability = ini.get_num_or("classify", "mean_stability", 0.05);
        co.params.plateau_level = ini.get_num_or("classify", "plateau_level", 0.9);
        co.params.slice_regime = static_cast<int>(ini.get_int_or("classify", "slice_regime", 1));
        if (co.params.horizons.size() < 2)
            throw ConfigError("config: classify horizons needs at least two entries");
        if (co.params.slice_regime < 1 || co.params.slice_regime > rc.model.num_regimes)
            throw ConfigError("config: slice_regime out of range");
    }

    if (ini.has_section("generator-eval") || rc.command == "generator-eval") {
        auto& ge = rc.generator_eval;
        ge.function = ini.get_or("generator-eval", "function", "power-radial");
        for (const std::string key : {"delta", "beta", "gamma", "cap_start", "cap_end"})
            if (ini.has("generator-eval", key))
                ge.fn_params[key] = ini.get_num("generator-eval", key);
        ge.points = detail::parse_points(ini.get_or("generator-eval", "points", "2"), rc.model.dim);
        std::vector<double> regs = ini.get_list_or("generator-eval", "regimes", {});
        for (double r : regs) {
            const int ri = static_cast<int>(r);
            if (ri < 1 || ri > rc.model.num_regimes)
                throw ConfigError("config: generator-eval regime out of range");
            ge.regimes.push_back(ri);
        }
    }

    if (ini.has_section("lyapunov") || rc.command == "lyapunov") {
        auto& ly = rc.lyapunov;
        ly.criterion = ini.get_or("lyapunov", "criterion", "c1");
        const std::set<std::string> crits = {"c1", "c2", "e51", "e52", "exit-witness"};
        if (!crits.count(ly.criterion))
            throw ConfigError("config: unknown lyapunov criterion '" + ly.criterion + "'");
        ly.function = ini.get_or("lyapunov", "function", "power-radial");
        for (const std::string key : {"delta", "beta", "gamma", "cap_start", "cap_end"})
            if (ini.has("lyapunov", key)) ly.fn_params[key] = ini.get_num("lyapunov", key);
        ly.r_min = ini.get_num_or("lyapunov", "r_min", 1.0);
        ly.r_max = ini.get_num_or("lyapunov", "r_max", 100.0);
        ly.radii = static_cast<int>(ini.get_int_or("lyapunov", "radii", 32));
        ly.directions = static_cast<int>(ini.get_int_or("lyapunov", "directions", 16));
        ly.e51_delta = ini.get_num_or("lyapunov", "e51_delta", 0.5);
        ly.e52_radii = ini.get_list_or("lyapunov", "e52_radii", {2, 4, 8, 16, 32, 64});
        ly.witness_domain_radius = ini.get_num_or("lyapunov", "domain_radius", 2.0);
        if (!(ly.r_min > 0.0 && ly.r_min < ly.r_max))
            throw ConfigError("config: lyapunov needs 0 < r_min < r_max");
    }

    ini.check_consumed();
    return rc;
}

inline RunConfig load_run_config_file(const std::string& path) {
    return load_run_config(Ini::parse_file(path));
}

}  // namespace rsjd

#endif
