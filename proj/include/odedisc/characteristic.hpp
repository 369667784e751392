/// \file characteristic.hpp
/// \brief Companion-matrix eigenvalue analysis of candidate ODE coefficients.
///
/// A candidate homogeneous linear constant-coefficient ODE
///     sum_p C_p d^p y / dx^p = 0,   p = 0..P,
/// is characterized by the roots of sum_p C_p lambda^p.  The roots are
/// computed as eigenvalues of the (balanced) companion matrix, clustered
/// into unique modes with multiplicities, and each mode maps to one
/// eigenfunction of the general solution.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "odedisc/errors.hpp"

namespace odedisc {

/// Coefficients C_0..C_P of a candidate ODE; index = derivative order.
struct CoefficientVector {
    std::vector<double> coeffs;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Relative floor under which the leading coefficient counts as zero.
inline constexpr double kLeadingCoefficientFloor = 1e-8;

/// Default absolute-plus-relative tolerance for eigenvalue clustering.
inline constexpr double kDefaultClusterTol = 1e-6;

/// Throws unless the vector is usable for companion-matrix construction.
inline void validate_coefficients(const CoefficientVector& c) {
    if (c.order() < 1)
        throw LeadingCoefficientZero("coefficient vector needs order >= 1");
    double max_abs = 0.0;
    for (double v : c.coeffs) {
        if (!std::isfinite(v))
            throw LeadingCoefficientZero("non-finite coefficient");
        max_abs = std::max(max_abs, std::abs(v));
    }
    if (max_abs == 0.0 ||
        std::abs(c.coeffs.back()) < kLeadingCoefficientFloor * max_abs)
        throw LeadingCoefficientZero("leading coefficient below threshold");
}

/// One unique eigenvalue: multiplicity alpha, real part beta, imaginary
/// part gamma.  Conjugate pairs are collapsed, so gamma >= 0 always.
struct EigenMode {
    int multiplicity = 1;
    double real_part = 0.0;
    double imag_part = 0.0;
};

/// 2 when the mode stands for a conjugate pair, else 1.
inline int pair_weight(const EigenMode& m) { return m.imag_part > 0.0 ? 2 : 1; }

/// The clustered eigenvalue set of one candidate, sorted by (beta, gamma).
struct EigenSpectrum {
    std::vector<EigenMode> modes;
    int source_order = 0;

    /// sum over modes of multiplicity * pair_weight; equals source_order.
    int pair_weighted_order() const {
        int total = 0;
        for (const auto& m : modes) total += m.multiplicity * pair_weight(m);
        return total;
    }
};

/// P x P companion matrix of the monic normalization of the candidate:
/// ones on the superdiagonal, last row -C_j / C_P.
inline Eigen::MatrixXd companion_matrix(const CoefficientVector& c) {
    validate_coefficients(c);
    const int p = c.order();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i + 1 < p; ++i) m(i, i + 1) = 1.0;
    const double lead = c.coeffs[p];
    for (int j = 0; j < p; ++j) m(p - 1, j) = -c.coeffs[j] / lead;
    return m;
}

namespace detail {

/// Parlett-Reinsch balancing: scale row/column pairs by powers of two until
/// the 1-norms stop improving.  Exact in floating point, so eigenvalues are
/// unchanged while conditioning improves.
inline void balance_in_place(Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd diag = m.diagonal();
    m.diagonal().setZero();
    const double gamma = 0.9;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            const double row_norm = m.row(i).lpNorm<1>();
            const double col_norm = m.col(i).lpNorm<1>();
            if (row_norm == 0.0 || col_norm == 0.0) continue;
            int exponent = 0;
            std::frexp(row_norm / col_norm, &exponent);
            exponent /= 2;
            if (exponent != 0) {
                const double scaled_col = std::ldexp(col_norm, exponent);
                const double scaled_row = std::ldexp(row_norm, -exponent);
                if (scaled_col + scaled_row < gamma * (col_norm + row_norm)) {
                    changed = true;
                    m.row(i) *= std::ldexp(1.0, -exponent);
                    m.col(i) *= std::ldexp(1.0, exponent);
                }
            }
        }
    }
    m.diagonal() = diag;
}

/// Greedy clustering of roots already mapped into one half plane.
/// Two roots coincide when |a - b| <= tol * max(1, |a|).
inline std::vector<EigenMode> cluster_roots(
    std::vector<std::complex<double>> roots, double tol, bool conjugate_pairs) {
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<EigenMode> modes;
    std::size_t i = 0;
    while (i < roots.size()) {
        std::complex<double> sum = roots[i];
        std::size_t count = 1;
        while (i + count < roots.size()) {
            const std::complex<double> mean = sum / static_cast<double>(count);
            const std::complex<double>& cand = roots[i + count];
            if (std::abs(cand - mean) <= tol * std::max(1.0, std::abs(mean))) {
                sum += cand;
                ++count;
            } else {
                break;
            }
        }
        const std::complex<double> mean = sum / static_cast<double>(count);
        EigenMode mode;
        mode.multiplicity = static_cast<int>(count);
        mode.real_part = mean.real();
        mode.imag_part = conjugate_pairs ? mean.imag() : 0.0;
        modes.push_back(mode);
        i += count;
    }
    return modes;
}

}  // namespace detail

/// Eigenvalues of the balanced companion matrix, grouped into unique modes
/// within cluster_tol; conjugate pairs merged into one mode with gamma >= 0.
inline EigenSpectrum eigen_spectrum(const CoefficientVector& c,
                                    double cluster_tol = kDefaultClusterTol) {
    Eigen::MatrixXd m = companion_matrix(c);
    detail::balance_in_place(m);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw EigenSolveFailure("companion eigenvalue iteration failed");

    const auto& eig = solver.eigenvalues();
    std::vector<std::complex<double>> real_roots, upper_roots;
    int lower_count = 0;
    for (int i = 0; i < eig.size(); ++i) {
        std::complex<double> root = eig(i);
        if (!std::isfinite(root.real()) || !std::isfinite(root.imag()))
            throw EigenSolveFailure("non-finite eigenvalue");
        // a pair within cluster_tol of the real axis is two near-equal
        // real roots, not an oscillatory mode
        if (std::abs(root.imag()) <=
            0.5 * cluster_tol * std::max(1.0, std::abs(root)))
            root = {root.real(), 0.0};
        if (root.imag() == 0.0)
            real_roots.push_back(root);
        else if (root.imag() > 0.0)
            upper_roots.push_back(root);
        else
            ++lower_count;
    }
    if (lower_count != static_cast<int>(upper_roots.size()))
        throw EigenSolveFailure("unpaired complex eigenvalues");

    EigenSpectrum spectrum;
    spectrum.source_order = c.order();
    auto modes = detail::cluster_roots(std::move(real_roots), cluster_tol,
                                       /*conjugate_pairs=*/false);
    auto pairs = detail::cluster_roots(std::move(upper_roots), cluster_tol,
                                       /*conjugate_pairs=*/true);
    modes.insert(modes.end(), pairs.begin(), pairs.end());
    std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
        return a.real_part != b.real_part ? a.real_part < b.real_part
                                          : a.imag_part < b.imag_part;
    });
    spectrum.modes = std::move(modes);
    if (spectrum.pair_weighted_order() != spectrum.source_order)
        throw EigenSolveFailure("multiplicity bookkeeping mismatch");
    return spectrum;
}

/// Eigenfunction of one mode:
///     (sum_{j=0..alpha} x^j) * exp(beta x) * (cos(gamma x) + sin(gamma x)).
/// The j-sum deliberately runs to alpha inclusive.  Overflow is not an
/// error: the non-finite value is the marker callers map to a penalty.
inline double eigenfunction_value(const EigenMode& mode, double x) {
    double poly = 0.0, xpow = 1.0;
    for (int j = 0; j <= mode.multiplicity; ++j) {
        poly += xpow;
        xpow *= x;
    }
    const double growth = std::exp(mode.real_part * x);
    const double phase =
        std::cos(mode.imag_part * x) + std::sin(mode.imag_part * x);
    return poly * growth * phase;
}

}  // namespace odedisc
