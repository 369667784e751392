/// \file bspline.hpp
/// \brief Clamped B-spline least-squares approximation with adaptive knot
///        refinement and analytic derivatives of any order.
///
/// The Cox-de Boor convention is used throughout: order w basis functions
/// are piecewise polynomials of degree w - 1.  Knot vectors are clamped
/// (first and last knot repeated degree+1 times).
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "odedisc/errors.hpp"

namespace odedisc {

struct KnotVector {
    std::vector<double> knots;  ///< non-decreasing, clamped ends
    int degree = 1;

    int basis_count() const {
        return static_cast<int>(knots.size()) - degree - 1;
    }
    double domain_min() const { return knots.front(); }
    double domain_max() const { return knots.back(); }
};

/// Clamped knot vector with n_basis - degree - 1 equally spaced interior
/// knots over [x_min, x_max].
inline KnotVector uniform_knots(double x_min, double x_max, int degree,
                                int n_basis) {
    if (!(x_min < x_max)) throw InvalidDomain("x_min must be < x_max");
    if (degree < 1) throw InvalidDomain("degree must be >= 1");
    if (n_basis < degree + 1)
        throw InvalidDomain("n_basis must be >= degree + 1");
    KnotVector kv;
    kv.degree = degree;
    const int n_interior = n_basis - degree - 1;
    kv.knots.reserve(n_basis + degree + 1);
    for (int i = 0; i <= degree; ++i) kv.knots.push_back(x_min);
    for (int i = 1; i <= n_interior; ++i)
        kv.knots.push_back(x_min + (x_max - x_min) * i / (n_interior + 1));
    for (int i = 0; i <= degree; ++i) kv.knots.push_back(x_max);
    return kv;
}

/// Cox-de Boor recursion, evaluated bottom-up.  Order 1 is the indicator
/// of [t_s, t_{s+1}); terms with zero denominator contribute zero.
/// Verbatim half-open convention, so every basis vanishes at the last knot.
inline double basis_value(const KnotVector& kv, int index, int order,
                          double x) {
    const auto& t = kv.knots;
    const int n = static_cast<int>(t.size());
    if (order < 1 || index < 0 || index + order >= n)
        throw IndexOutOfRange("basis index/order outside knot vector");

    std::vector<double> level(order);
    for (int j = 0; j < order; ++j)
        level[j] = (t[index + j] <= x && x < t[index + j + 1]) ? 1.0 : 0.0;
    for (int w = 2; w <= order; ++w) {
        for (int j = 0; j + w <= order; ++j) {
            const int i = index + j;
            const double d1 = t[i + w - 1] - t[i];
            const double d2 = t[i + w] - t[i + 1];
            const double a = d1 > 0.0 ? (x - t[i]) / d1 * level[j] : 0.0;
            const double b =
                d2 > 0.0 ? (t[i + w] - x) / d2 * level[j + 1] : 0.0;
            level[j] = a + b;
        }
    }
    return level[0];
}

namespace detail {

/// Index j with t_j <= x < t_{j+1} among the nonempty spans; x at or past
/// the domain end maps to the last nonempty span so evaluation is closed
/// on the right.
inline int find_span(const std::vector<double>& t, int degree, double x) {
    const int n_basis = static_cast<int>(t.size()) - degree - 1;
    if (x >= t[n_basis]) return n_basis - 1;
    if (x <= t[degree]) return degree;
    int lo = degree, hi = n_basis;
    int mid = (lo + hi) / 2;
    while (x < t[mid] || x >= t[mid + 1]) {
        if (x < t[mid])
            hi = mid;
        else
            lo = mid;
        mid = (lo + hi) / 2;
    }
    return mid;
}

/// All degree+1 basis values that are nonzero on the span (triangular
/// scheme); out[r] = B_{span-degree+r}(x).
inline void basis_funs(const std::vector<double>& t, int span, int degree,
                       double x, double* out) {
    std::vector<double> left(degree + 1), right(degree + 1);
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

}  // namespace detail

/// Piecewise-polynomial model S(x) = sum_s mu_s B_s(x).
struct SplineModel {
    KnotVector knot_vector;
    std::vector<double> control_coeffs;
    double x_min = 0.0;
    double x_max = 0.0;

    double evaluate(double x) const {
        if (x < x_min || x > x_max)
            throw OutsideDomain("evaluation point outside spline domain");
        const int d = knot_vector.degree;
        const int span = detail::find_span(knot_vector.knots, d, x);
        std::vector<double> basis(d + 1);
        detail::basis_funs(knot_vector.knots, span, d, x, basis.data());
        double value = 0.0;
        for (int r = 0; r <= d; ++r)
            value += basis[r] * control_coeffs[span - d + r];
        return value;
    }

    /// Analytic p-th derivative at x: control-coefficient difference
    /// quotients reduce the degree by one per differentiation; p beyond
    /// the degree is exactly zero.
    double derivative(int p, double x) const;
};

/// The spline whose value is the first derivative of the input: degree
/// drops by one, one knot falls off each end.
inline SplineModel derivative_model(const SplineModel& m) {
    const int d = m.knot_vector.degree;
    const auto& t = m.knot_vector.knots;
    const auto& c = m.control_coeffs;
    SplineModel out;
    out.x_min = m.x_min;
    out.x_max = m.x_max;
    out.knot_vector.degree = d - 1;
    out.knot_vector.knots.assign(t.begin() + 1, t.end() - 1);
    out.control_coeffs.resize(c.size() - 1);
    for (std::size_t s = 0; s + 1 < c.size(); ++s) {
        const double denom = t[s + d + 1] - t[s + 1];
        out.control_coeffs[s] = denom > 0.0 ? d * (c[s + 1] - c[s]) / denom : 0.0;
    }
    return out;
}

inline double SplineModel::derivative(int p, double x) const {
    if (x < x_min || x > x_max)
        throw OutsideDomain("evaluation point outside spline domain");
    if (p < 0) throw IndexOutOfRange("derivative order must be >= 0");
    if (p == 0) return evaluate(x);
    if (p > knot_vector.degree) return 0.0;
    SplineModel reduced = derivative_model(*this);
    for (int q = 1; q < p; ++q) reduced = derivative_model(reduced);
    return reduced.evaluate(x);
}

/// Least-squares spline fit: control coefficients minimizing
/// sum_k (y_k - S(x_k))^2 over the precomputed basis matrix.
/// Requires xs ascending and inside the knot domain.
inline SplineModel fit_spline(const std::vector<double>& xs,
                              const std::vector<double>& ys,
                              const KnotVector& kv) {
    const int m = static_cast<int>(xs.size());
    const int nb = kv.basis_count();
    if (m < nb)
        throw RankDeficientFit("fewer data points than basis functions");
    const int d = kv.degree;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, nb);
    std::vector<char> supported(nb, 0);
    std::vector<double> basis(d + 1);
    for (int k = 0; k < m; ++k) {
        const int span = detail::find_span(kv.knots, d, xs[k]);
        detail::basis_funs(kv.knots, span, d, xs[k], basis.data());
        for (int r = 0; r <= d; ++r) {
            a(k, span - d + r) = basis[r];
            if (basis[r] > 0.0) supported[span - d + r] = 1;
        }
    }
    for (int j = 0; j < nb; ++j)
        if (!supported[j])
            throw RankDeficientFit("basis function without data support");

    Eigen::Map<const Eigen::VectorXd> y(ys.data(), ys.size());
    Eigen::VectorXd mu = a.colPivHouseholderQr().solve(y);

    SplineModel model;
    model.knot_vector = kv;
    model.control_coeffs.assign(mu.data(), mu.data() + mu.size());
    model.x_min = kv.domain_min();
    model.x_max = kv.domain_max();
    return model;
}

/// Squared-residual sum over one nonempty knot span.
struct SpanError {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double phi = 0.0;
    std::size_t n_points = 0;
};

/// phi(t_j) = sum of r_k^2 over x_k in [t_j, t_{j+1}) for every nonempty
/// span (last span closed on the right).  xs must be ascending.
inline std::vector<SpanError> span_errors(const SplineModel& model,
                                          const std::vector<double>& xs,
                                          const std::vector<double>& ys) {
    const auto& t = model.knot_vector.knots;
    const int d = model.knot_vector.degree;
    const int nb = model.knot_vector.basis_count();
    std::vector<SpanError> spans;
    for (int j = d; j < nb; ++j) {
        if (!(t[j] < t[j + 1])) continue;
        SpanError se;
        se.t_lo = t[j];
        se.t_hi = t[j + 1];
        const auto lo = std::lower_bound(xs.begin(), xs.end(), se.t_lo);
        const auto hi = (j == nb - 1)
                            ? std::upper_bound(xs.begin(), xs.end(), se.t_hi)
                            : std::lower_bound(xs.begin(), xs.end(), se.t_hi);
        for (auto it = lo; it != hi; ++it) {
            const std::size_t k = static_cast<std::size_t>(it - xs.begin());
            const double r = ys[k] - model.evaluate(xs[k]);
            se.phi += r * r;
            ++se.n_points;
        }
        spans.push_back(se);
    }
    return spans;
}

struct RefineResult {
    SplineModel model;
    bool converged = false;
    int rounds = 0;        ///< refits performed after the initial model
    double max_phi = 0.0;  ///< final worst span error
    std::vector<double> total_sq_residuals;  ///< per inspection, non-increasing
};

/// Adaptive knot refinement: spans with phi > tau receive their midpoint
/// as a new knot and the spline is refit, until every span satisfies tau
/// or max_rounds is hit.  A span is only split when both halves would keep
/// at least degree+1 data points, which keeps every fit full rank.
/// Non-convergence is reported through the result, not thrown.
inline RefineResult refine_spline(const std::vector<double>& xs,
                                  const std::vector<double>& ys,
                                  const SplineModel& initial, double tau,
                                  int max_rounds = 12) {
    if (!(tau > 0.0)) throw InvalidDomain("tau must be positive");
    RefineResult result;
    result.model = initial;
    const int d = initial.knot_vector.degree;

    for (int round = 0;; ++round) {
        const auto spans = span_errors(result.model, xs, ys);
        double total = 0.0, max_phi = 0.0;
        for (const auto& se : spans) {
            total += se.phi;
            max_phi = std::max(max_phi, se.phi);
        }
        result.total_sq_residuals.push_back(total);
        result.max_phi = max_phi;

        if (max_phi <= tau) {
            result.converged = true;
            break;
        }
        if (round == max_rounds) break;

        std::vector<double> inserts;
        for (const auto& se : spans) {
            if (se.phi <= tau) continue;
            const double mid = 0.5 * (se.t_lo + se.t_hi);
            const auto lo = std::lower_bound(xs.begin(), xs.end(), se.t_lo);
            const auto split = std::lower_bound(xs.begin(), xs.end(), mid);
            const auto hi = std::lower_bound(xs.begin(), xs.end(), se.t_hi);
            if (split - lo >= d + 1 && hi - split >= d + 1)
                inserts.push_back(mid);
        }
        if (inserts.empty()) break;  // every hot span is data-starved

        KnotVector kv = result.model.knot_vector;
        kv.knots.insert(kv.knots.end(), inserts.begin(), inserts.end());
        std::sort(kv.knots.begin(), kv.knots.end());
        result.model = fit_spline(xs, ys, kv);
        result.rounds = round + 1;
    }
    return result;
}

}  // namespace odedisc
