#ifndef RSJD_COMMON_HPP
#define RSJD_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsjd {

// Spatial dimension is small (d <= 3); plain vectors keep the API simple.
using Vec = std::vector<double>;
// Row-major square matrix, dimension implied by context.
using Mat = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(Vec a, const Vec& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
    return a;
}

inline Vec operator*(double c, Vec a) {
    for (auto& v : a) v *= c;
    return a;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += c * x[k];
}

// y = A x  (A row-major d x d)
inline Vec matvec(const Mat& A, const Vec& x) {
    const std::size_t d = x.size();
    Vec y(d, 0.0);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) y[r] += A[r * d + c] * x[c];
    return y;
}

// C = A B' for row-major d x d matrices (used for a = sigma sigma')
inline Mat mat_abt(const Mat& A, const Mat& B, std::size_t d) {
    Mat C(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += A[r * d + k] * B[c * d + k];
            C[r * d + c] = s;
        }
    return C;
}

inline double trace_prod(const Mat& A, const Mat& B, std::size_t d) {
    double s = 0.0;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) s += A[r * d + c] * B[c * d + r];
    return s;
}

inline bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline std::string format_point(const Vec& x, int regime) {
    std::ostringstream os;
    os << "(x=[";
    for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
    os << "], i=" << regime << ")";
    return os.str();
}

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeneratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rsjd

#endif
