#ifndef RSJD_RNG_HPP
#define RSJD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rsjd {

// Counter-based generator: output_k = mix(key, k). Streams derived from
// (seed, stream_index) are independent and reproducible regardless of the
// order paths are scheduled in. Distributions below are implemented by hand
// so results are bit-identical across platforms and standard libraries.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
        : key_(mix_(key ^ 0x9e3779b97f4a7c15ull)), counter_(counter) {}

    static CounterRng stream(std::uint64_t seed, std::uint64_t stream_index) {
        return CounterRng(mix_(seed + 0x9e3779b97f4a7c15ull * (stream_index + 1)));
    }

    std::uint64_t next_u64() { return mix_(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // standard normal, Box-Muller; second value cached
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        // avoid log(0)
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(th);
        have_cached_ = true;
        return r * std::cos(th);
    }

    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

    // Poisson count by multiplication of uniforms; fine for the per-step
    // rates used here (lambda*dt is small). Guarded against pathological use.
    long poisson(double lambda) {
        if (lambda < 0.0) throw std::invalid_argument("poisson: negative rate");
        if (lambda == 0.0) return 0;
        if (lambda > 700.0) throw std::invalid_argument("poisson: rate too large for sampler");
        long k = 0;
        if (lambda <= 60.0) {
            const double limit = std::exp(-lambda);
            double prod = uniform();
            while (prod > limit) {
                ++k;
                prod *= uniform();
            }
            return k;
        }
        // split large rates into chunks to keep exp(-lambda) representable
        long total = 0;
        double remaining = lambda;
        while (remaining > 0.0) {
            const double chunk = remaining > 60.0 ? 60.0 : remaining;
            total += poisson(chunk);
            remaining -= chunk;
        }
        return total;
    }

  private:
    // splitmix64 finalizer
    static std::uint64_t mix_(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace rsjd

#endif
