#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rsjd/builtin_models.hpp"
#include "rsjd/stopping.hpp"

using namespace rsjd;

namespace {

ModelSpec brownian() {
    ModelSpec spec;
    spec.dim = 1;
    spec.num_regimes = 1;
    spec.drift = [](const Vec&, int) { return Vec{0.0}; };
    spec.diffusion = [](const Vec&, int) { return Mat{1.0}; };
    spec.q_matrix = [](const Vec&) { return Mat{0.0}; };
    return spec;
}

}  // namespace

TEST_CASE("Brownian exit time from the unit interval matches the Dirichlet solution") {
    // E tau = R^2 - x0^2 for dX = dW; from 0 with R = 1 this is exactly 1
    ModelSpec spec = brownian();
    SimConfig cfg;
    cfg.dt = 2e-4;
    cfg.t_max = 100.0;
    auto st = estimate_exit(spec, cfg, Vec{0.0}, 1, 1.0, 2000, 314);
    REQUIRE(st.n_anomalous == 0);
    REQUIRE(st.hit_fraction == 1.0);
    // allow the O(sqrt(dt)) boundary overshoot bias on top of 3 SE
    REQUIRE(st.hit_mean == Catch::Approx(1.0).margin(3.0 * st.hit_se + 2.0 * std::sqrt(cfg.dt)));

    auto off_center = estimate_exit(spec, cfg, Vec{0.5}, 1, 1.0, 2000, 314);
    REQUIRE(off_center.hit_mean ==
            Catch::Approx(0.75).margin(3.0 * off_center.hit_se + 2.0 * std::sqrt(cfg.dt)));
}

TEST_CASE("a start on the boundary exits at time zero") {
    ModelSpec spec = brownian();
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 10.0;
    auto st = estimate_exit(spec, cfg, Vec{1.0}, 1, 1.0, 50, 1);
    REQUIRE(st.hit_fraction == 1.0);
    REQUIRE(st.hit_mean == 0.0);
}

TEST_CASE("paths stopped by the step budget are counted as anomalous") {
    ModelSpec spec = brownian();
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 10.0;
    cfg.max_steps = 10;
    auto st = estimate_exit(spec, cfg, Vec{0.0}, 1, 1.0, 100, 2);
    REQUIRE(st.n_anomalous > 0);
    REQUIRE(st.n_anomalous + st.n_hit == st.n_paths);
}

TEST_CASE("a frozen path never reaches a distant target") {
    ModelSpec spec = brownian();
    spec.diffusion = [](const Vec&, int) { return Mat{0.0}; };
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 5.0;
    TargetSet target{Vec{0.0}, 1.0, 0};
    auto st = estimate_hitting(spec, cfg, Vec{3.0}, 1, target, 20, 3);
    REQUIRE(st.n_hit == 0);
    REQUIRE(st.hit_fraction == 0.0);
    REQUIRE(st.censored_mean == Catch::Approx(cfg.t_max));
    REQUIRE(st.escape_distance_median == Catch::Approx(3.0));
    REQUIRE(st.survival_fraction.back() == 1.0);
}

TEST_CASE("slice targets are hit no more often than the cylinder") {
    ModelSpec spec = builtin_model("example-5.1");
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 4.0;
    TargetSet cylinder{Vec{0.0}, 0.5, 0};
    TargetSet slice = cylinder;
    slice.regime = 2;
    auto a = estimate_hitting(spec, cfg, Vec{2.0}, 1, cylinder, 400, 55);
    auto b = estimate_hitting(spec, cfg, Vec{2.0}, 1, slice, 400, 55);
    REQUIRE(b.n_hit <= a.n_hit);
    REQUIRE(a.n_hit > 0);
}

TEST_CASE("hit fraction is monotone in the horizon under a shared seed") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.01;
    TargetSet target{Vec{0.0}, 1.0, 0};
    cfg.t_max = 1.0;
    auto shortrun = estimate_hitting(spec, cfg, Vec{3.0}, 1, target, 400, 77);
    cfg.t_max = 4.0;
    auto longrun = estimate_hitting(spec, cfg, Vec{3.0}, 1, target, 400, 77);
    REQUIRE(longrun.n_hit >= shortrun.n_hit);
    // survival curves are non-increasing
    for (std::size_t k = 1; k < longrun.survival_fraction.size(); ++k)
        REQUIRE(longrun.survival_fraction[k] <= longrun.survival_fraction[k - 1]);
}

TEST_CASE("classify reports strong evidence for the OU benchmark") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.01;
    ClassifyParams prm;
    prm.horizons = {2.0, 4.0, 8.0, 16.0};
    auto cls = classify(spec, cfg, {{Vec{3.0}, 1}}, {TargetSet{Vec{0.0}, 1.0, 0}}, 500, 99, prm);
    REQUIRE(cls.verdict == Verdict::positive_recurrent_evidence);
    REQUIRE(cls.cells.size() == 1);  // single regime, so no slice cell
    REQUIRE(cls.cells[0].per_horizon.size() == 4);
}

TEST_CASE("classify suspects transience for the outward diffusion") {
    ModelSpec spec = builtin_model("example-5.3-diffusion");
    SimConfig cfg;
    cfg.dt = 0.01;
    ClassifyParams prm;
    prm.horizons = {4.0, 8.0, 16.0, 32.0};
    auto cls = classify(spec, cfg, {{Vec{3.0}, 1}}, {TargetSet{Vec{0.0}, 1.0, 0}}, 400, 21, prm);
    REQUIRE(cls.verdict == Verdict::transience_suspected);
    // both the cylinder and the regime slice agree
    REQUIRE(cls.cells.size() == 2);
    for (const auto& cell : cls.cells) {
        REQUIRE(cell.verdict == Verdict::transience_suspected);
        REQUIRE(cell.per_horizon.back().hit_fraction < 0.2);
    }
}

TEST_CASE("verdicts print as hyphenated strings") {
    REQUIRE(std::string(to_string(Verdict::positive_recurrent_evidence)) ==
            "positive-recurrent-evidence");
    REQUIRE(std::string(to_string(Verdict::recurrent_evidence)) == "recurrent-evidence");
    REQUIRE(std::string(to_string(Verdict::transience_suspected)) == "transience-suspected");
    REQUIRE(std::string(to_string(Verdict::inconclusive)) == "inconclusive");
}

TEST_CASE("input validation") {
    ModelSpec spec = brownian();
    SimConfig cfg;
    TargetSet bad{Vec{0.0, 0.0}, 1.0, 0};
    REQUIRE_THROWS_AS(estimate_hitting(spec, cfg, Vec{0.0}, 1, bad, 10, 1), SimulationError);
    ClassifyParams prm;
    prm.horizons = {4.0};
    REQUIRE_THROWS_AS(
        classify(spec, cfg, {{Vec{0.0}, 1}}, {TargetSet{Vec{0.0}, 1.0, 0}}, 10, 1, prm),
        SimulationError);
    REQUIRE_THROWS_AS(classify(spec, cfg, {}, {TargetSet{Vec{0.0}, 1.0, 0}}, 10, 1),
                      SimulationError);
}
