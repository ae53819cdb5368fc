#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rsjd/builtin_models.hpp"
#include "rsjd/ergodic.hpp"

using namespace rsjd;

namespace {

// OU marginal with a two-state switch at rates lambda (1 -> 2) and mu (2 -> 1)
ModelSpec switching_ou(double lambda, double mu) {
    ModelSpec spec;
    spec.dim = 1;
    spec.num_regimes = 2;
    spec.drift = [](const Vec& x, int) { return Vec{-x[0]}; };
    spec.diffusion = [](const Vec&, int) { return Mat{std::sqrt(2.0)}; };
    spec.q_matrix = [lambda, mu](const Vec&) { return Mat{-lambda, lambda, mu, -mu}; };
    spec.q_bound = std::max(lambda, mu);
    return spec;
}

}  // namespace

TEST_CASE("bin grid indexing round-trips through cell centers") {
    BinGrid g1(1, 2, 8.0, 64);
    REQUIRE(g1.cells_per_regime() == 65);
    REQUIRE(g1.size() == 130);
    for (int cell : {0, 13, 31, 63}) {
        const Vec c = g1.center(cell);
        REQUIRE(g1.index(c, 1) == cell);
        REQUIRE(g1.index(c, 2) == g1.cells_per_regime() + cell);
    }
    REQUIRE(g1.index(Vec{9.0}, 1) == g1.overflow_cell());
    REQUIRE(g1.index(Vec{-8.5}, 2) == g1.cells_per_regime() + g1.overflow_cell());

    BinGrid g2(2, 1, 4.0, 16);
    REQUIRE(g2.cells_per_regime() == 257);
    for (int cell : {0, 5, 100, 255}) {
        REQUIRE(g2.index(g2.center(cell), 1) == cell);
    }
    REQUIRE(g2.index(Vec{5.0, 0.0}, 1) == g2.overflow_cell());
    REQUIRE_THROWS_AS(BinGrid(3, 1, 4.0), SimulationError);
}

TEST_CASE("OU invariant measure recovers the standard normal second moment") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.005;
    CycleConfig cyc;
    cyc.n_cycles = 400;
    auto est = estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 4242);
    REQUIRE_FALSE(est.aborted);
    REQUIRE(est.n_cycles == 400);
    REQUIRE(est.mean_cycle_length > 0.0);

    double total = 0.0, second = 0.0;
    const int cpr = est.grid.cells_per_regime();
    for (int cell = 0; cell < cpr - 1; ++cell) {
        const double x = est.grid.center(cell)[0];
        total += est.weight[cell];
        second += est.weight[cell] * x * x;
    }
    total += est.weight[est.grid.overflow_cell()];
    REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(est.weight[est.grid.overflow_cell()] < 1e-3);
    REQUIRE(second == Catch::Approx(1.0).margin(0.08));
}

TEST_CASE("two-state switch recovers the analytic regime marginal") {
    const double lambda = 1.0, mu = 2.0;
    ModelSpec spec = switching_ou(lambda, mu);
    SimConfig cfg;
    cfg.dt = 0.005;
    CycleConfig cyc;
    cyc.n_cycles = 300;
    auto est = estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 909);
    const double p1 = mu / (lambda + mu);
    REQUIRE(est.regime_mass(1) == Catch::Approx(p1).margin(0.05));
    REQUIRE(est.regime_mass(2) == Catch::Approx(1.0 - p1).margin(0.05));
    REQUIRE(est.regime_mass(1) + est.regime_mass(2) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("cycle occupation accounts for every step of the cycle") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.01;
    CycleConfig cyc;
    cyc.n_cycles = 30;
    BinGrid grid(1, 1, 4.0 * cyc.d_radius, cyc.bins_per_axis);
    auto st = run_cycles(spec, cfg, cyc, grid, Vec{0.0}, 1, 11);
    REQUIRE(st.lengths.size() == 30);
    REQUIRE(st.embedded.size() == 30);
    for (std::size_t c = 0; c < st.lengths.size(); ++c) {
        double occ = 0.0;
        for (double v : st.occupation[c]) occ += v;
        REQUIRE(occ == Catch::Approx(st.lengths[c]).margin(cfg.dt));
        REQUIRE(st.lengths[c] > 0.0);
    }
    // embedded chain starts inside the return set and is roughly symmetric
    double mean = 0.0;
    for (const auto& x : st.embedded) {
        REQUIRE(norm(x) <= cyc.e_radius + 1e-12);
        mean += x[0];
    }
    REQUIRE(std::abs(mean / st.embedded.size()) < 0.6);
}

TEST_CASE("a frozen path cannot complete cycles") {
    ModelSpec spec;
    spec.dim = 1;
    spec.num_regimes = 1;
    spec.drift = [](const Vec&, int) { return Vec{0.0}; };
    spec.diffusion = [](const Vec&, int) { return Mat{1e-6}; };
    spec.q_matrix = [](const Vec&) { return Mat{0.0}; };
    SimConfig cfg;
    cfg.dt = 0.01;
    CycleConfig cyc;
    cyc.max_cycle_time = 5.0;
    REQUIRE_THROWS_AS(estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 1), SimulationError);
}

TEST_CASE("the E to D gap must dominate the step length") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.01;
    CycleConfig cyc;
    cyc.d_radius = 1.0;
    cyc.e_radius = 0.99;
    REQUIRE_THROWS_AS(estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 1), SimulationError);
    cyc = CycleConfig{};
    cyc.n_cycles = 1;
    REQUIRE_THROWS_AS(estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 1), SimulationError);
}

TEST_CASE("time averages of simple observables") {
    ModelSpec spec = switching_ou(1.0, 1.0);
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 50.0;

    auto one = time_average(spec, cfg, Vec{0.0}, 1,
                            [](const Vec&, int) { return 1.0; }, 5);
    REQUIRE(one.value == 1.0);
    REQUIRE(one.se == 0.0);
    REQUIRE(one.total_time == Catch::Approx(50.0));

    auto reg = time_average(spec, cfg, Vec{0.0}, 1,
                            [](const Vec&, int i) { return i == 1 ? 1.0 : 0.0; }, 5);
    REQUIRE(reg.value == Catch::Approx(0.5).margin(4.0 * reg.se + 0.02));

    // OU occupation of the unit interval: 2 Phi(1) - 1
    ModelSpec ou = builtin_model("ou-benchmark");
    auto ball = time_average(ou, cfg, Vec{0.0}, 1,
                             [](const Vec& x, int) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; },
                             5);
    REQUIRE(ball.value == Catch::Approx(0.6827).margin(4.0 * ball.se + 0.02));
}

TEST_CASE("invariant histogram and time average agree on a shared observable") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.005;
    CycleConfig cyc;
    cyc.n_cycles = 300;
    auto est = estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 77);
    double mass = 0.0, var = 0.0;
    const int cpr = est.grid.cells_per_regime();
    for (int cell = 0; cell < cpr - 1; ++cell) {
        if (std::abs(est.grid.center(cell)[0]) <= 1.0) {
            mass += est.weight[cell];
            var += est.se[cell] * est.se[cell];
        }
    }
    SimConfig tcfg = cfg;
    tcfg.t_max = 100.0;
    auto ta = time_average(spec, tcfg, Vec{0.0}, 1,
                           [](const Vec& x, int) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; },
                           31);
    const double combined = std::sqrt(var + ta.se * ta.se);
    REQUIRE(mass == Catch::Approx(ta.value).margin(3.0 * combined + 0.02));
}

TEST_CASE("positivity check distinguishes bulk, tail, and uncovered boxes") {
    ModelSpec spec = builtin_model("ou-benchmark");
    SimConfig cfg;
    cfg.dt = 0.005;
    CycleConfig cyc;
    cyc.n_cycles = 300;
    auto est = estimate_invariant(spec, cfg, cyc, Vec{0.0}, 1, 500);

    auto bulk = positivity_check(est, Vec{-1.0}, Vec{1.0}, 1);
    REQUIRE(bulk.status == PositivityStatus::positive);
    REQUIRE(bulk.mass > 0.5);

    // Gaussian mass of [2, 3] is about 0.0214 and should register as positive
    auto tail = positivity_check(est, Vec{2.0}, Vec{3.0}, 1);
    REQUIRE(tail.status == PositivityStatus::positive);
    REQUIRE(tail.mass == Catch::Approx(0.02135).margin(3.0 * tail.se + 0.01));

    auto empty = positivity_check(est, Vec{6.5}, Vec{7.5}, 1);
    REQUIRE(empty.status == PositivityStatus::not_positive);

    auto outside = positivity_check(est, Vec{7.5}, Vec{9.0}, 1);
    REQUIRE(outside.status == PositivityStatus::not_covered);
}
