/// \file nullspace.hpp
/// \brief ODE coefficient extraction from the spline's gradient matrix.
///
/// Rows p = 0..P of the gradient matrix hold the p-th spline derivative at
/// the sample points.  The coefficient vector of the governing ODE is the
/// right singular vector of the smallest singular value of G^T, then
/// normalized so a pivot coefficient equals +1 and sparsified with the
/// threshold transform.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "odedisc/bspline.hpp"
#include "odedisc/characteristic.hpp"
#include "odedisc/errors.hpp"

namespace odedisc {

/// Samples stay away from the clamped ends where spline derivatives are
/// least accurate.
inline constexpr double kGradientTrimFraction = 0.02;
inline constexpr int kDefaultGradientSamples = 1000;
inline constexpr double kDefaultRankTol = 1e-8;

struct GradientMatrix {
    Eigen::MatrixXd entries;        ///< (P+1) x n_samples, row p = d^p y/dx^p
    std::vector<double> sample_xs;  ///< the n_samples evaluation points
};

/// Derivative rows 0..P sampled uniformly over the trimmed interior of the
/// spline domain.
inline GradientMatrix gradient_matrix(const SplineModel& model,
                                      int candidate_order,
                                      int n_samples = kDefaultGradientSamples,
                                      double trim_fraction = kGradientTrimFraction) {
    if (candidate_order > model.knot_vector.degree)
        throw OrderExceedsDegree("candidate order exceeds spline degree");
    if (n_samples < candidate_order + 1)
        throw OrderExceedsDegree("need at least P+1 gradient samples");

    const double width = model.x_max - model.x_min;
    const double lo = model.x_min + trim_fraction * width;
    const double hi = model.x_max - trim_fraction * width;

    GradientMatrix g;
    g.sample_xs.resize(n_samples);
    for (int k = 0; k < n_samples; ++k)
        g.sample_xs[k] = lo + (hi - lo) * k / (n_samples - 1);

    g.entries.resize(candidate_order + 1, n_samples);
    SplineModel current = model;
    for (int p = 0; p <= candidate_order; ++p) {
        if (p > 0) current = derivative_model(current);
        for (int k = 0; k < n_samples; ++k)
            g.entries(p, k) = current.evaluate(g.sample_xs[k]);
    }
    if (!g.entries.allFinite())
        throw OutsideDomain("non-finite gradient matrix entry");
    return g;
}

/// Recovered ODE: unit null vector, pivot-normalized sparsified
/// coefficients, and diagnostics.
struct DiscoveredODE {
    CoefficientVector coefficients;      ///< pivot coefficient = +1, sub-threshold entries zeroed
    std::vector<double> raw_null_vector; ///< unit norm, pivot-positive once normalized
    double residual = 0.0;               ///< ||G^T C|| / (n_samples * ||C||)
    int rank_estimate = 0;
    std::vector<double> sparsity_mask;   ///< threshold transform of |coefficients|
};

/// SVD of G^T: rank estimate from the relative tolerance, null vector from
/// the smallest singular value.  A full-rank G^T still yields the
/// minimal-sigma direction; the large residual is the diagnostic.
inline DiscoveredODE null_coefficients(const GradientMatrix& g,
                                       double rank_tol = kDefaultRankTol) {
    const Eigen::MatrixXd gt = g.entries.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gt, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma(0);

    DiscoveredODE out;
    if (sigma_max == 0.0) {
        // zero gradient matrix carries no coefficient information
        out.raw_null_vector.assign(g.entries.rows(), 0.0);
        out.coefficients.coeffs = out.raw_null_vector;
        return out;
    }
    out.rank_estimate = 0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma(i) >= rank_tol * sigma_max) ++out.rank_estimate;

    const Eigen::VectorXd v = svd.matrixV().col(svd.matrixV().cols() - 1);
    out.raw_null_vector.assign(v.data(), v.data() + v.size());
    out.coefficients.coeffs = out.raw_null_vector;
    out.residual = (gt * v).norm() /
                   (static_cast<double>(g.sample_xs.size()) * v.norm());
    return out;
}

/// Pivot selection for coefficient normalization.
struct PivotRule {
    bool lowest_surviving = true;
    int order_k = 0;

    static PivotRule lowest() { return PivotRule{}; }
    static PivotRule order(int k) { return PivotRule{false, k}; }
};

inline constexpr double kDefaultZeroTol = 1e-4;
inline constexpr double kSpringOneTol = 0.98;
inline constexpr double kKineticsOneTol = 0.1;

/// Divides by the pivot coefficient (sign flipped so it is +1), zeroes
/// entries whose unit-norm magnitude is below zero_tol, and fills the
/// sparsity mask: below zero_tol -> 0, above one_tol -> 1, linear in
/// between.
inline DiscoveredODE normalize_and_sparsify(const DiscoveredODE& d,
                                            PivotRule pivot,
                                            double zero_tol = kDefaultZeroTol,
                                            double one_tol = kSpringOneTol) {
    Eigen::Map<const Eigen::VectorXd> raw(d.raw_null_vector.data(),
                                          d.raw_null_vector.size());
    const double norm = raw.norm();
    if (norm == 0.0)
        throw AllCoefficientsBelowTolerance("null vector is zero");
    const int n = static_cast<int>(raw.size());

    std::vector<char> surviving(n, 0);
    for (int p = 0; p < n; ++p)
        surviving[p] = std::abs(raw(p)) / norm >= zero_tol;

    int pivot_index = -1;
    if (pivot.lowest_surviving) {
        for (int p = 0; p < n && pivot_index < 0; ++p)
            if (surviving[p]) pivot_index = p;
        if (pivot_index < 0)
            throw AllCoefficientsBelowTolerance(
                "no coefficient above zero tolerance");
    } else {
        if (pivot.order_k < 0 || pivot.order_k >= n)
            throw IndexOutOfRange("pivot order outside coefficient range");
        pivot_index = pivot.order_k;
        if (!surviving[pivot_index])
            throw AllCoefficientsBelowTolerance(
                "pivot coefficient below zero tolerance");
    }

    DiscoveredODE out = d;
    const double sign = raw(pivot_index) >= 0.0 ? 1.0 : -1.0;
    for (int p = 0; p < n; ++p)
        out.raw_null_vector[p] = sign * raw(p) / norm;

    const double pivot_value = out.raw_null_vector[pivot_index];
    out.coefficients.coeffs.assign(n, 0.0);
    for (int p = 0; p < n; ++p)
        if (surviving[p])
            out.coefficients.coeffs[p] = out.raw_null_vector[p] / pivot_value;

    out.sparsity_mask.assign(n, 0.0);
    for (int p = 0; p < n; ++p) {
        const double mag = std::abs(out.coefficients.coeffs[p]);
        if (mag < zero_tol)
            out.sparsity_mask[p] = 0.0;
        else if (mag > one_tol)
            out.sparsity_mask[p] = 1.0;
        else
            out.sparsity_mask[p] = (mag - zero_tol) / (one_tol - zero_tol);
    }
    return out;
}

}  // namespace odedisc
