/// Shared test utilities: closed-form oracles and pinned RNG stubs.
#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "odedisc/characteristic.hpp"

namespace test_helpers {

/// Quadratic-formula oracle: both roots of c2 x^2 + c1 x + c0 = 0.
inline std::pair<std::complex<double>, std::complex<double>> quadratic_roots(
    double c0, double c1, double c2) {
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(c1 * c1 - 4.0 * c2 * c0, 0.0));
    return {(-c1 + disc) / (2.0 * c2), (-c1 - disc) / (2.0 * c2)};
}

/// Expands a spectrum back into the full root multiset (conjugates
/// restored, multiplicities repeated).
inline std::vector<std::complex<double>> expand_roots(
    const odedisc::EigenSpectrum& spectrum) {
    std::vector<std::complex<double>> roots;
    for (const auto& m : spectrum.modes) {
        for (int i = 0; i < m.multiplicity; ++i) {
            roots.emplace_back(m.real_part, m.imag_part);
            if (m.imag_part > 0.0) roots.emplace_back(m.real_part, -m.imag_part);
        }
    }
    return roots;
}

/// Characteristic polynomial value sum_p C_p lambda^p.
inline std::complex<double> char_poly(const std::vector<double>& coeffs,
                                      std::complex<double> lambda) {
    std::complex<double> acc(0.0, 0.0), pow(1.0, 0.0);
    for (double c : coeffs) {
        acc += c * pow;
        pow *= lambda;
    }
    return acc;
}

/// RNG stub returning a fixed cycle of uniform01 values.
struct FixedRng {
    std::vector<double> values;
    std::size_t next = 0;

    double uniform01() {
        const double v = values[next % values.size()];
        ++next;
        return v;
    }
    double gaussian() { return uniform01(); }
};

}  // namespace test_helpers
