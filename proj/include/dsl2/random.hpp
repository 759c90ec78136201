#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace dsl2 {

/// Seedable generator used for every random instance.
///
/// The engine is std::mt19937_64 (fully specified by the standard). Uniform
/// doubles are produced as (x >> 11) * 2^-53, never through
/// std::uniform_real_distribution, whose output is library-specific. This
/// keeps random instances reproducible across standard libraries and
/// languages.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Log-uniform positive value in [lo, hi).
    double positive(double lo = 0.5, double hi = 2.0);

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

inline double Rng::positive(double lo, double hi) {
    const double a = std::log(lo);
    const double b = std::log(hi);
    return std::exp(uniform(a, b));
}

} // namespace dsl2
