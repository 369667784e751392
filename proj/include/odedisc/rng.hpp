/// \file rng.hpp
/// \brief Seeded random number generation with bit-reproducible output.
///
/// std::mt19937_64 is fully specified by the standard, but the distribution
/// adaptors are not, so uniform and Gaussian variates are mapped by hand.
/// The same seed therefore yields the same stream on every platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace odedisc {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller (two uniforms per call, no caching).
    double gaussian() {
        // keep u1 strictly positive so log() is finite
        double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    std::uint64_t next_raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace odedisc
