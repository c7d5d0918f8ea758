#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace almi {

/// Seeded random stream with stable draw semantics.
///
/// Distributions are derived from raw mt19937_64 output by hand instead of
/// going through <random> distribution objects, whose draw sequences are
/// implementation-defined. Equal seeds therefore give bitwise-equal streams
/// on any platform, which the run reproducibility contract depends on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform draw in [0, 1) with 53 bits of resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1p-53;
    }

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal draw (Box-Muller, spare value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// FNV-1a 64-bit hash. Used to derive per-run seeds from string keys so
/// batch results do not depend on execution order or std::hash internals.
inline std::uint64_t fnv1a_hash(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace almi
