#ifndef RSJD_QUADRATURE_HPP
#define RSJD_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "rsjd/common.hpp"

namespace rsjd {
namespace quad {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1].
inline constexpr double kGkNodes[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double kKronrodW[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

// Gauss weights attach to the odd-indexed Kronrod nodes.
inline constexpr double kGaussW[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

inline Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double kres = 0.0, gres = 0.0, kabs = 0.0;
    for (int k = 0; k < 15; ++k) {
        const double fv = f(c + h * kGkNodes[k]);
        kres += kKronrodW[k] * fv;
        kabs += kKronrodW[k] * std::abs(fv);
        if (k % 2 == 1) gres += kGaussW[k / 2] * fv;
    }
    kres *= h;
    gres *= h;
    kabs *= h;
    double err = std::abs(kres - gres);
    // standard sharpening of the raw difference, normalized by the magnitude
    // of the integrand so large-scale integrands are not penalized, with a
    // round-off floor so the estimate never drops below machine precision
    if (err > 0.0 && kabs > 0.0)
        err = kabs * std::min(1.0, std::pow(200.0 * err / kabs, 1.5));
    err = std::max(err, 5e-15 * kabs);
    return {a, b, kres, err};
}

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int subdivisions = 0;
};

// Adaptive integration over the union of [breaks[k], breaks[k+1]].
// Stops when total error <= max(abs_tol, rel_tol * |value|).
inline Result integrate_breaks(const std::function<double(double)>& f, std::vector<double> breaks,
                               double rel_tol = 1e-10, double abs_tol = 0.0,
                               int max_subdivisions = 4000) {
    std::sort(breaks.begin(), breaks.end());
    std::priority_queue<Interval> heap;
    double value = 0.0, error = 0.0;
    int count = 0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        if (breaks[k + 1] <= breaks[k]) continue;
        Interval iv = gk15(f, breaks[k], breaks[k + 1]);
        value += iv.value;
        error += iv.error;
        heap.push(iv);
        ++count;
    }
    while (!heap.empty() && error > std::max(abs_tol, rel_tol * std::abs(value)) &&
           count < max_subdivisions) {
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) continue;  // interval exhausted in doubles
        Interval left = gk15(f, worst.a, mid);
        Interval right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    Result res;
    res.value = value;
    res.error = error;
    res.subdivisions = count;
    res.converged = error <= std::max(abs_tol, rel_tol * std::max(std::abs(value), 1e-300));
    return res;
}

inline Result integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 0.0,
                        int max_subdivisions = 4000) {
    return integrate_breaks(f, {a, b}, rel_tol, abs_tol, max_subdivisions);
}

// Breakpoints graded geometrically towards `a` (for integrands singular
// or steep at the left endpoint, e.g. stable-like kernels at the origin).
inline std::vector<double> graded_breaks(double a, double b, int levels = 24) {
    std::vector<double> br{a};
    const double span = b - a;
    for (int k = levels; k >= 1; --k) br.push_back(a + span * std::pow(0.5, k));
    br.push_back(b);
    return br;
}

// Log-spaced breakpoints on [a, b], 0 < a < b; used for heavy-tailed outer
// integrals spanning many decades.
inline std::vector<double> log_breaks(double a, double b, int per_decade = 4) {
    std::vector<double> br;
    const double la = std::log10(a), lb = std::log10(b);
    const int n = std::max(2, static_cast<int>((lb - la) * per_decade) + 1);
    for (int k = 0; k <= n; ++k) br.push_back(std::pow(10.0, la + (lb - la) * k / n));
    br.front() = a;
    br.back() = b;
    return br;
}

}  // namespace quad
}  // namespace rsjd

#endif
