#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rsjd/rng.hpp"

using rsjd::CounterRng;

TEST_CASE("identical streams reproduce bit-identically") {
    CounterRng a = CounterRng::stream(1234, 7);
    CounterRng b = CounterRng::stream(1234, 7);
    for (int k = 0; k < 1000; ++k) REQUIRE(a.next_u64() == b.next_u64());
    for (int k = 0; k < 100; ++k) REQUIRE(a.normal() == b.normal());
}

TEST_CASE("different stream indices decorrelate") {
    CounterRng a = CounterRng::stream(1234, 0);
    CounterRng b = CounterRng::stream(1234, 1);
    int agree = 0;
    double corr = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const double ua = a.uniform(), ub = b.uniform();
        if (std::abs(ua - ub) < 1e-12) ++agree;
        corr += (ua - 0.5) * (ub - 0.5);
    }
    REQUIRE(agree == 0);
    // sample correlation of uniforms: var 1/12, SE ~ (1/12)/sqrt(n)
    REQUIRE(std::abs(corr / n) < 4.0 / (12.0 * std::sqrt(double(n))));
}

TEST_CASE("uniform moments") {
    CounterRng r = CounterRng::stream(99, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        s += u;
        s2 += u * u;
    }
    REQUIRE(s / n == Catch::Approx(0.5).margin(4.0 * std::sqrt(1.0 / 12 / n)));
    REQUIRE(s2 / n == Catch::Approx(1.0 / 3).margin(0.005));
}

TEST_CASE("normal moments up to kurtosis") {
    CounterRng r = CounterRng::stream(7, 3);
    const int n = 400000;
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (int k = 0; k < n; ++k) {
        const double x = r.normal();
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    REQUIRE(m1 == Catch::Approx(0.0).margin(4.0 / std::sqrt(double(n))));
    REQUIRE(m2 == Catch::Approx(1.0).margin(0.01));
    REQUIRE(m3 == Catch::Approx(0.0).margin(0.02));
    REQUIRE(m4 == Catch::Approx(3.0).margin(0.06));
}

TEST_CASE("exponential mean") {
    CounterRng r = CounterRng::stream(11, 0);
    const int n = 100000;
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += r.exponential(2.0);
    REQUIRE(s / n == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("poisson mean and variance, small and chunked rates") {
    CounterRng r = CounterRng::stream(5, 0);
    for (double lambda : {0.3, 4.0, 150.0}) {
        const int n = lambda > 100 ? 20000 : 100000;
        double s = 0.0, s2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double v = double(r.poisson(lambda));
            s += v;
            s2 += v * v;
        }
        const double mean = s / n, var = s2 / n - mean * mean;
        REQUIRE(mean == Catch::Approx(lambda).margin(4.0 * std::sqrt(lambda / n)));
        REQUIRE(var == Catch::Approx(lambda).epsilon(0.05));
    }
    REQUIRE(r.poisson(0.0) == 0);
    REQUIRE_THROWS(r.poisson(-1.0));
    REQUIRE_THROWS(r.poisson(1e6));
}
