// Command-line front end: runs one command described by an INI config file
// and writes machine-readable outputs plus a manifest that allows any run to
// be replayed bit for bit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rsjd/builtin_models.hpp"
#include "rsjd/config.hpp"
#include "rsjd/ergodic.hpp"
#include "rsjd/generator.hpp"
#include "rsjd/lyapunov.hpp"
#include "rsjd/model.hpp"
#include "rsjd/simulate.hpp"
#include "rsjd/stopping.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsjd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;  // run completed, result is a failed check

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
}

std::string format_csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json vec_to_json(const Vec& v) { return json(std::vector<double>(v.begin(), v.end())); }

json hitting_to_json(const HittingStats& st) {
    std::ostringstream surv;
    surv << "t,survival\n";
    for (std::size_t k = 0; k < st.survival_times.size(); ++k)
        surv << format_csv_number(st.survival_times[k]) << ','
             << format_csv_number(st.survival_fraction[k]) << '\n';
    return json{{"n_paths", st.n_paths},
                {"n_hit", st.n_hit},
                {"horizon", st.horizon},
                {"hit_fraction", st.hit_fraction},
                {"censored_mean", st.censored_mean},
                {"censored_se", st.censored_se},
                {"hit_mean", st.hit_mean},
                {"hit_se", st.hit_se},
                {"escape_distance_median", st.escape_distance_median},
                {"escape_distance_max", st.escape_distance_max},
                {"n_anomalous", st.n_anomalous},
                {"survival_csv", surv.str()}};
}

json criterion_to_json(const CriterionReport& rep) {
    json fails = json::array();
    for (const auto& f : rep.failures)
        fails.push_back({{"x", vec_to_json(f.x)}, {"regime", f.regime}, {"value", f.value}});
    json j{{"criterion", to_string(rep.criterion)},
           {"status", to_string(rep.status)},
           {"grid", rep.grid_desc},
           {"margin", rep.margin},
           {"failures", fails}};
    if (std::isfinite(rep.witness_radius)) j["witness_radius"] = rep.witness_radius;
    if (std::isfinite(rep.required_scale)) j["required_scale"] = rep.required_scale;
    if (rep.criterion == Criterion::C2) {
        j["growth_ratio"] = rep.growth_ratio;
        j["growth_ok"] = rep.growth_ok;
    }
    if (!rep.e51_values.empty()) {
        json vals = json::object();
        for (const auto& [n, v] : rep.e51_values) vals[std::to_string(n)] = v;
        j["values_at_largest_radius"] = vals;
    }
    return j;
}

struct RunOutput {
    std::vector<std::string> files;  // names relative to out_dir
    int exit_code = kExitOk;
};

TestFunction make_function(const RunConfig& rc, const std::string& family,
                           const std::map<std::string, double>& params) {
    return builtin_lyapunov(family, params, rc.model.dim);
}

RunOutput cmd_validate(const RunConfig& rc, const fs::path& out) {
    auto rep = validate_spec(rc.model, rc.validate_box_radius, rc.validate_samples, rc.seed);
    json checks = json::array();
    for (const auto& e : rep.entries)
        checks.push_back({{"id", e.id},
                          {"status", to_string(e.status)},
                          {"margin", e.margin},
                          {"witness_x", vec_to_json(e.witness_x)},
                          {"witness_regime", e.witness_regime},
                          {"note", e.note}});
    json j{{"model", rc.model.name},
           {"box_radius", rc.validate_box_radius},
           {"samples", rc.validate_samples},
           {"checks", checks},
           {"all_passed", rep.all_passed()}};
    write_file(out / "report.json", j.dump(2) + "\n");
    return {{"report.json"}, rep.all_passed() ? kExitOk : kExitNegative};
}

RunOutput cmd_generator_eval(const RunConfig& rc, const fs::path& out) {
    const auto& ge = rc.generator_eval;
    TestFunction f = make_function(rc, ge.function, ge.fn_params);
    std::vector<int> regimes = ge.regimes;
    if (regimes.empty())
        for (int i = 1; i <= rc.model.num_regimes; ++i) regimes.push_back(i);
    json points = json::array();
    for (const auto& x : ge.points) {
        for (int i : regimes) {
            const double loc = local_term(rc.model, f, x, i);
            const double sw = switching_term(rc.model, f, x, i);
            NonlocalResult nl;
            if (rc.model.has_jumps()) nl = nonlocal_term_full(rc.model, f, x, i, rc.quad);
            points.push_back({{"x", vec_to_json(x)},
                              {"regime", i},
                              {"local", loc},
                              {"switching", sw},
                              {"nonlocal", nl.value},
                              {"nonlocal_error", nl.error_bound},
                              {"tail_bound", nl.tail_bound},
                              {"total", loc + sw + nl.value}});
        }
    }
    json j{{"model", rc.model.name}, {"function", ge.function}, {"points", points}};
    write_file(out / "generator_eval.json", j.dump(2) + "\n");
    return {{"generator_eval.json"}, kExitOk};
}

RunOutput cmd_lyapunov(const RunConfig& rc, const fs::path& out) {
    const auto& ly = rc.lyapunov;
    json j{{"model", rc.model.name}, {"criterion", ly.criterion}};
    int code = kExitOk;
    if (ly.criterion == "c1" || ly.criterion == "c2") {
        TestFunction V = make_function(rc, ly.function, ly.fn_params);
        CriterionReport rep =
            ly.criterion == "c1"
                ? check_c1(rc.model, V, ly.r_min, ly.r_max, ly.radii, ly.directions, rc.quad)
                : check_c2(rc.model, V, ly.r_min, ly.r_max, ly.radii, ly.directions, rc.quad);
        j["function"] = ly.function;
        j["report"] = criterion_to_json(rep);
        if (rep.status == CritStatus::fails) code = kExitNegative;
    } else if (ly.criterion == "e51") {
        std::vector<double> radii;
        for (int k = 0; k < ly.radii; ++k)
            radii.push_back(ly.r_min * std::pow(ly.r_max / ly.r_min,
                                                ly.radii == 1 ? 0.0 : double(k) / (ly.radii - 1)));
        CriterionReport rep =
            e51_criterion(rc.model, ly.e51_delta, radii, ly.directions, rc.quad);
        j["report"] = criterion_to_json(rep);
        if (rep.status == CritStatus::fails) code = kExitNegative;
    } else if (ly.criterion == "e52") {
        CriterionReport rep = drift_jump_criterion_1d(rc.model, ly.e52_radii, rc.quad);
        j["report"] = criterion_to_json(rep);
        if (rep.status == CritStatus::fails) code = kExitNegative;
    } else {  // exit-witness
        ExitWitness w = exit_witness(rc.model, ly.witness_domain_radius, rc.quad, rc.seed);
        j["report"] = json{{"beta", w.beta},
                           {"gamma", w.gamma},
                           {"kappa0", w.kappa0},
                           {"kappa1", w.kappa1},
                           {"min_gv", w.min_gv},
                           {"check_passed", w.check_passed},
                           {"domain_radius", ly.witness_domain_radius}};
        if (!w.check_passed) code = kExitNegative;
    }
    write_file(out / "lyapunov_report.json", j.dump(2) + "\n");
    return {{"lyapunov_report.json"}, code};
}

RunOutput cmd_simulate(const RunConfig& rc, const fs::path& out) {
    // path 0 is written in full; the ensemble summary covers all paths
    double sum_norm = 0.0, sum_sq = 0.0;
    long total_jumps = 0, total_switches = 0;
    std::vector<long> regime_counts(rc.model.num_regimes, 0);
    std::ostringstream csv;
    csv << "t";
    for (int k = 1; k <= rc.model.dim; ++k) csv << ",x_" << k;
    csv << ",regime,event_flag\n";
    simulate_ensemble(rc.model, rc.sim, rc.x0, rc.regime0, rc.seed, rc.sim_paths,
                      [&](long p, const PathRecord& rec) {
                          const double n = norm(rec.final_x);
                          sum_norm += n;
                          sum_sq += n * n;
                          total_jumps += rec.jump_count;
                          total_switches += rec.switch_count;
                          ++regime_counts[rec.final_regime - 1];
                          if (p != 0) return;
                          for (std::size_t k = 0; k < rec.times.size(); ++k) {
                              csv << format_csv_number(rec.times[k]);
                              for (double v : rec.states[k]) csv << ',' << format_csv_number(v);
                              csv << ',' << rec.regimes[k] << ',' << rec.event_flags[k] << '\n';
                          }
                      });
    write_file(out / "path.csv", csv.str());
    const double mean = sum_norm / rc.sim_paths;
    const double var = std::max(0.0, sum_sq / rc.sim_paths - mean * mean);
    json j{{"model", rc.model.name},
           {"paths", rc.sim_paths},
           {"dt", rc.sim.dt},
           {"t_max", rc.sim.t_max},
           {"eps", rc.sim.eps},
           {"final_norm_mean", mean},
           {"final_norm_se", rc.sim_paths > 1 ? std::sqrt(var / (rc.sim_paths - 1)) : 0.0},
           {"total_jumps", total_jumps},
           {"total_switches", total_switches},
           {"final_regime_counts", regime_counts}};
    write_file(out / "summary.json", j.dump(2) + "\n");
    return {{"path.csv", "summary.json"}, kExitOk};
}

RunOutput cmd_hitting(const RunConfig& rc, const fs::path& out) {
    auto st = estimate_hitting(rc.model, rc.sim, rc.x0, rc.regime0, rc.hitting.target,
                               rc.hitting.paths, rc.seed);
    json j{{"model", rc.model.name},
           {"target_center", vec_to_json(rc.hitting.target.center)},
           {"target_radius", rc.hitting.target.radius},
           {"target_regime", rc.hitting.target.regime},
           {"stats", hitting_to_json(st)}};
    write_file(out / "hitting.json", j.dump(2) + "\n");
    return {{"hitting.json"}, kExitOk};
}

RunOutput cmd_classify(const RunConfig& rc, const fs::path& out) {
    const auto& co = rc.classify_opts;
    TargetSet second = co.target;
    second.radius = co.second_radius > 0.0 ? co.second_radius : 1.5 * co.target.radius;
    auto rep = classify(rc.model, rc.sim, {{rc.x0, rc.regime0}}, {co.target, second}, co.paths,
                        rc.seed, co.params);
    json cells = json::array();
    for (const auto& cell : rep.cells) {
        json horizons = json::array();
        for (const auto& st : cell.per_horizon) horizons.push_back(hitting_to_json(st));
        cells.push_back({{"start", vec_to_json(cell.start)},
                         {"start_regime", cell.start_regime},
                         {"target_center", vec_to_json(cell.target.center)},
                         {"target_radius", cell.target.radius},
                         {"kind", cell.kind},
                         {"verdict", to_string(cell.verdict)},
                         {"note", cell.note},
                         {"per_horizon", horizons}});
    }
    json j{{"model", rc.model.name},
           {"verdict", to_string(rep.verdict)},
           {"note", rep.note},
           {"cells", cells}};
    write_file(out / "classify.json", j.dump(2) + "\n");
    return {{"classify.json"}, rep.verdict == Verdict::inconclusive ? kExitNegative : kExitOk};
}

RunOutput cmd_invariant(const RunConfig& rc, const fs::path& out) {
    auto est = estimate_invariant(rc.model, rc.sim, rc.cycles, rc.x0, rc.regime0, rc.seed,
                                  rc.bootstrap_reps);
    std::ostringstream csv;
    for (int k = 1; k <= est.grid.dim; ++k) csv << "bin_center_" << k << ',';
    csv << "regime,weight,se\n";
    const int cpr = est.grid.cells_per_regime();
    json overflow = json::array();
    for (int i = 1; i <= est.grid.num_regimes; ++i) {
        for (int cell = 0; cell < cpr - 1; ++cell) {
            const int flat = (i - 1) * cpr + cell;
            if (est.weight[flat] == 0.0 && est.se[flat] == 0.0) continue;
            for (double c : est.grid.center(cell)) csv << format_csv_number(c) << ',';
            csv << i << ',' << format_csv_number(est.weight[flat]) << ','
                << format_csv_number(est.se[flat]) << '\n';
        }
        const int flat = (i - 1) * cpr + est.grid.overflow_cell();
        overflow.push_back({{"regime", i}, {"weight", est.weight[flat]}, {"se", est.se[flat]}});
    }
    write_file(out / "invariant.csv", csv.str());
    json masses = json::array();
    for (int i = 1; i <= est.grid.num_regimes; ++i) masses.push_back(est.regime_mass(i));
    json j{{"model", rc.model.name},
           {"n_cycles", est.n_cycles},
           {"aborted", est.aborted},
           {"total_time", est.total_time},
           {"mean_cycle_length", est.mean_cycle_length},
           {"cycle_length_se", est.cycle_length_se},
           {"grid_extent", est.grid.extent},
           {"bins_per_axis", est.grid.bins_per_axis},
           {"regime_mass", masses},
           {"overflow", overflow}};
    write_file(out / "invariant_summary.json", j.dump(2) + "\n");
    return {{"invariant.csv", "invariant_summary.json"}, kExitOk};
}

// FNV-1a, recorded per output so a replay mismatch is easy to localize
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

int run_from_text(const std::string& config_text, const std::string& out_override,
                  long seed_override, bool write_manifest) {
    std::istringstream in(config_text);
    RunConfig rc = load_run_config(Ini::parse(in));
    if (seed_override >= 0) rc.seed = static_cast<std::uint64_t>(seed_override);
    fs::path out = out_override.empty() ? fs::path(rc.out_dir) : fs::path(out_override);
    fs::create_directories(out);

    RunOutput ro;
    if (rc.command == "validate")
        ro = cmd_validate(rc, out);
    else if (rc.command == "generator-eval")
        ro = cmd_generator_eval(rc, out);
    else if (rc.command == "lyapunov")
        ro = cmd_lyapunov(rc, out);
    else if (rc.command == "simulate")
        ro = cmd_simulate(rc, out);
    else if (rc.command == "hitting")
        ro = cmd_hitting(rc, out);
    else if (rc.command == "classify")
        ro = cmd_classify(rc, out);
    else
        ro = cmd_invariant(rc, out);

    if (write_manifest) {
        json outputs = json::array();
        for (const auto& name : ro.files) {
            std::ostringstream h;
            h << std::hex << fnv1a(read_file(out / name));
            outputs.push_back({{"name", name}, {"fnv1a", h.str()}});
        }
        json manifest{{"tool", "rsjd"},
                      {"manifest_version", 1},
                      {"command", rc.command},
                      {"seed", rc.seed},
                      {"exit_code", ro.exit_code},
                      {"config", config_text},
                      {"outputs", outputs}};
        write_file(out / "manifest.json", manifest.dump(2) + "\n");
    }
    return ro.exit_code;
}

int reproduce(const std::string& dir) {
    const fs::path src(dir);
    json manifest = json::parse(read_file(src / "manifest.json"));
    const std::string config_text = manifest.at("config").get<std::string>();
    const fs::path replay = src / ".reproduce";
    fs::create_directories(replay);
    const int code = run_from_text(config_text, replay.string(), -1, false);
    bool identical = true;
    for (const auto& entry : manifest.at("outputs")) {
        const std::string name = entry.at("name").get<std::string>();
        const std::string fresh = read_file(replay / name);
        std::ostringstream h;
        h << std::hex << fnv1a(fresh);
        const bool same = h.str() == entry.at("fnv1a").get<std::string>() &&
                          fresh == read_file(src / name);
        std::cout << (same ? "match    " : "MISMATCH ") << name << "\n";
        if (!same) identical = false;
    }
    if (!identical) return kExitNegative;
    if (manifest.contains("exit_code") && manifest.at("exit_code").get<int>() != code) {
        std::cout << "MISMATCH exit code\n";
        return kExitNegative;
    }
    std::cout << "reproduction verified\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regime-switching jump diffusion toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, repro_dir;
    long seed_override = -1;
    int threads = 1;

    CLI::App* run = app.add_subcommand("run", "execute the command in a config file");
    run->add_option("--config", config_path, "INI config file")->required();
    run->add_option("--seed", seed_override, "override the config seed");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--threads", threads, "worker threads (only 1 is supported)");

    CLI::App* rep = app.add_subcommand("reproduce", "replay a finished run from its manifest");
    rep->add_option("dir", repro_dir, "output directory of the original run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (threads != 1) {
                std::cerr << "rsjd: only --threads 1 is supported; running single-threaded\n";
            }
            return run_from_text(read_file(config_path), out_dir, seed_override, true);
        }
        return reproduce(repro_dir);
    } catch (const std::exception& e) {
        std::cerr << "rsjd: error: " << e.what() << "\n";
        return kExitError;
    }
}
