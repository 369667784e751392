/// \file gensol.hpp
/// \brief Eigenfunction-basis general solution fitted by least squares.
///
/// For a candidate coefficient vector the eigenfunction basis is evaluated
/// on the samples, amplitudes are fitted by SVD least squares (the stable
/// form of the pseudoinverse), and the mean squared prediction error is the
/// fitness the genetic search minimizes.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "odedisc/characteristic.hpp"
#include "odedisc/errors.hpp"

namespace odedisc {

/// Sampled input-output data; xs strictly increasing, same length as ys.
struct TimeSeries {
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t size() const { return xs.size(); }
};

inline void validate_series(const TimeSeries& ts) {
    if (ts.xs.size() != ts.ys.size())
        throw InvalidInput("series xs/ys length mismatch");
    if (ts.xs.size() < 2) throw InvalidInput("series needs at least 2 points");
    for (std::size_t i = 0; i < ts.xs.size(); ++i) {
        if (!std::isfinite(ts.xs[i]) || !std::isfinite(ts.ys[i]))
            throw InvalidInput("non-finite sample in series");
        if (i > 0 && !(ts.xs[i] > ts.xs[i - 1]))
            throw InvalidInput("xs must be strictly increasing");
    }
}

/// PaperFaithful: one basis row per mode, cos and sin lumped with a shared
/// amplitude, j-sum up to alpha inclusive.  ExtendedPhase: one row per
/// x^j power (j = 0..alpha) and separate cos/sin rows for oscillatory
/// modes, which spans arbitrary phase.
enum class BasisLayout { PaperFaithful, ExtendedPhase };

/// Entries at or above this magnitude flag the basis as overflowed.
inline constexpr double kBasisOverflowLimit = 1e150;

/// Loss assigned to any candidate whose evaluation chain fails; finite so
/// selection can still rank an all-infeasible population.
inline constexpr double kFitnessPenalty = 1e30;

/// Singular values below cutoff * sigma_max are truncated in the fit.
inline constexpr double kSingularValueCutoff = 1e-10;

/// Fitted general solution: spectrum, one amplitude per basis row.
struct GeneralSolutionModel {
    EigenSpectrum spectrum;
    std::vector<double> amplitudes;
    BasisLayout basis_layout = BasisLayout::PaperFaithful;
};

/// Number of basis rows a spectrum spans under a layout.
inline int basis_row_count(const EigenSpectrum& spectrum, BasisLayout layout) {
    if (layout == BasisLayout::PaperFaithful)
        return static_cast<int>(spectrum.modes.size());
    int rows = 0;
    for (const auto& m : spectrum.modes)
        rows += (m.multiplicity + 1) * (m.imag_part > 0.0 ? 2 : 1);
    return rows;
}

/// Basis matrix with one row per basis function and one column per sample.
/// Throws BasisOverflow if any entry is non-finite or exceeds the limit.
inline Eigen::MatrixXd basis_matrix(const EigenSpectrum& spectrum,
                                    std::span<const double> xs,
                                    BasisLayout layout) {
    const int rows = basis_row_count(spectrum, layout);
    const int cols = static_cast<int>(xs.size());
    Eigen::MatrixXd e(rows, cols);
    for (int k = 0; k < cols; ++k) {
        const double x = xs[k];
        int r = 0;
        for (const auto& mode : spectrum.modes) {
            if (layout == BasisLayout::PaperFaithful) {
                e(r++, k) = eigenfunction_value(mode, x);
            } else {
                const double growth = std::exp(mode.real_part * x);
                double xpow = 1.0;
                for (int j = 0; j <= mode.multiplicity; ++j) {
                    if (mode.imag_part > 0.0) {
                        e(r++, k) = xpow * growth * std::cos(mode.imag_part * x);
                        e(r++, k) = xpow * growth * std::sin(mode.imag_part * x);
                    } else {
                        e(r++, k) = xpow * growth;
                    }
                    xpow *= x;
                }
            }
        }
    }
    if (!e.allFinite() || e.cwiseAbs().maxCoeff() > kBasisOverflowLimit)
        throw BasisOverflow("basis entry overflowed");
    return e;
}

/// Minimum-norm least-squares amplitudes solving E^T D = ys.
/// Singular values below the relative cutoff are truncated; if none
/// survive the basis is degenerate.
inline Eigen::VectorXd fit_amplitudes(const Eigen::MatrixXd& e,
                                      std::span<const double> ys) {
    if (static_cast<int>(ys.size()) != e.cols())
        throw DegenerateBasis("ys length does not match basis columns");
    Eigen::Map<const Eigen::VectorXd> y(ys.data(), ys.size());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(
        e.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kSingularValueCutoff);
    if (svd.rank() == 0)
        throw DegenerateBasis("all singular values below cutoff");
    return svd.solve(y);
}

/// y_pred(x_k) = sum_q D_q E_q(x_k) under the model's layout.
inline std::vector<double> predict(const GeneralSolutionModel& model,
                                   std::span<const double> xs) {
    const Eigen::MatrixXd e =
        basis_matrix(model.spectrum, xs, model.basis_layout);
    Eigen::Map<const Eigen::VectorXd> d(model.amplitudes.data(),
                                        model.amplitudes.size());
    Eigen::VectorXd y = e.transpose() * d;
    return {y.data(), y.data() + y.size()};
}

/// Spectrum + fitted amplitudes for one candidate on the given data.
inline GeneralSolutionModel fit_general_solution(const TimeSeries& data,
                                                 const CoefficientVector& c,
                                                 BasisLayout layout,
                                                 double cluster_tol = kDefaultClusterTol) {
    GeneralSolutionModel model;
    model.spectrum = eigen_spectrum(c, cluster_tol);
    model.basis_layout = layout;
    const Eigen::MatrixXd e = basis_matrix(model.spectrum, data.xs, layout);
    const Eigen::VectorXd d = fit_amplitudes(e, data.ys);
    model.amplitudes.assign(d.data(), d.data() + d.size());
    return model;
}

/// Mean squared error of the fitted general solution for one candidate.
/// Every failure along the chain (degenerate leading coefficient, eigen
/// solve failure, basis overflow, degenerate basis) maps to the penalty
/// constant; the return value is always finite and non-negative.
inline double fitness(const TimeSeries& data, const CoefficientVector& c,
                      BasisLayout layout = BasisLayout::PaperFaithful) {
    try {
        const EigenSpectrum spectrum = eigen_spectrum(c);
        const Eigen::MatrixXd e = basis_matrix(spectrum, data.xs, layout);
        const Eigen::VectorXd d = fit_amplitudes(e, data.ys);
        Eigen::Map<const Eigen::VectorXd> y(data.ys.data(), data.ys.size());
        const double mse =
            (e.transpose() * d - y).squaredNorm() / static_cast<double>(y.size());
        return std::isfinite(mse) ? mse : kFitnessPenalty;
    } catch (const Error&) {
        return kFitnessPenalty;
    }
}

}  // namespace odedisc
