/// \file datagen.hpp
/// \brief Benchmark data generators: damped spring-mass trajectories,
///        first-order decay curves, seeded Gaussian noise, and log-linear
///        augmentation of sparse kinetics series.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "odedisc/errors.hpp"
#include "odedisc/gensol.hpp"
#include "odedisc/rng.hpp"

namespace odedisc {

/// m x'' + b x' + k x = 0 with x(0) = x0, x'(0) = v0, sampled on [0, T].
struct SpringParams {
    double mass = 1.0;
    double damping = 0.0;
    double stiffness = 1.0;
    double x0 = 0.0;
    double v0 = 0.0;
    double duration = 1.0;
    int n_points = 2;

    void validate() const {
        if (!(mass > 0.0) || !(stiffness > 0.0) || damping < 0.0)
            throw InvalidInput("spring parameters must satisfy m,k > 0, b >= 0");
        if (!(duration > 0.0) || n_points < 2)
            throw InvalidInput("need positive duration and >= 2 points");
    }
};

/// Closed-form trajectory, regime chosen by the sign of d = b^2 - 4mk.
/// The constants solve the 2x2 boundary-condition system on the regime's
/// basis functions, so x(0) = x0 and x'(0) = v0 hold exactly.
inline TimeSeries spring_mass_series(const SpringParams& p) {
    p.validate();
    const double d = p.damping * p.damping - 4.0 * p.mass * p.stiffness;
    const double sigma = -p.damping / (2.0 * p.mass);

    TimeSeries ts;
    ts.xs.resize(p.n_points);
    ts.ys.resize(p.n_points);
    for (int i = 0; i < p.n_points; ++i)
        ts.xs[i] = p.duration * i / (p.n_points - 1);

    if (d > 0.0) {
        const double r1 = sigma + std::sqrt(d) / (2.0 * p.mass);
        const double r2 = sigma - std::sqrt(d) / (2.0 * p.mass);
        // [1 1; r1 r2] [c1 c2]^T = [x0 v0]^T
        const double c1 = (p.v0 - r2 * p.x0) / (r1 - r2);
        const double c2 = (r1 * p.x0 - p.v0) / (r1 - r2);
        for (int i = 0; i < p.n_points; ++i)
            ts.ys[i] = c1 * std::exp(r1 * ts.xs[i]) + c2 * std::exp(r2 * ts.xs[i]);
    } else if (d == 0.0) {
        const double c1 = p.x0;
        const double c2 = p.v0 - sigma * p.x0;
        for (int i = 0; i < p.n_points; ++i)
            ts.ys[i] = (c1 + c2 * ts.xs[i]) * std::exp(sigma * ts.xs[i]);
    } else {
        const double omega = std::sqrt(-d) / (2.0 * p.mass);
        const double c1 = p.x0;
        const double c2 = (p.v0 - sigma * p.x0) / omega;
        for (int i = 0; i < p.n_points; ++i)
            ts.ys[i] = std::exp(sigma * ts.xs[i]) *
                       (c1 * std::cos(omega * ts.xs[i]) +
                        c2 * std::sin(omega * ts.xs[i]));
    }
    return ts;
}

/// C(t) = c0 exp(-rate_k t) on a uniform grid.
inline TimeSeries first_order_series(double rate_k, double c0, double duration,
                                     int n_points) {
    if (!(rate_k > 0.0) || !(c0 > 0.0))
        throw InvalidInput("rate constant and c0 must be positive");
    if (!(duration > 0.0) || n_points < 2)
        throw InvalidInput("need positive duration and >= 2 points");
    TimeSeries ts;
    ts.xs.resize(n_points);
    ts.ys.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        ts.xs[i] = duration * i / (n_points - 1);
        ts.ys[i] = c0 * std::exp(-rate_k * ts.xs[i]);
    }
    return ts;
}

/// Additive Gaussian noise: y' = y + scale * N(mean, sd), seeded.
struct NoiseSpec {
    double mean = 0.5;
    double sd = 0.1;
    double scale = 0.001;
    std::uint64_t seed = 0;

    void validate() const {
        if (sd < 0.0 || scale < 0.0)
            throw InvalidInput("noise sd and scale must be non-negative");
    }
};

inline TimeSeries add_noise(const TimeSeries& ts, const NoiseSpec& spec) {
    spec.validate();
    TimeSeries out = ts;
    if (spec.scale == 0.0) return out;
    Rng rng(spec.seed);
    for (auto& y : out.ys)
        y += spec.scale * (spec.mean + spec.sd * rng.gaussian());
    return out;
}

/// Densifies a sparse positive concentration series: linear interpolation
/// of ln(y / c0) onto a uniform grid of n_new points spanning the sparse
/// xs, inverse transform, then noise.  Exact on exponentials; the sparse
/// endpoints are reproduced exactly before noise.
inline TimeSeries augment_log_linear(const TimeSeries& sparse, int n_new,
                                     double c0, const NoiseSpec& noise) {
    validate_series(sparse);
    if (!(c0 > 0.0)) throw NonPositiveConcentration("c0 must be positive");
    for (double y : sparse.ys)
        if (!(y > 0.0))
            throw NonPositiveConcentration("series values must be positive");
    if (n_new < 2) throw InvalidInput("n_new must be >= 2");

    std::vector<double> logs(sparse.size());
    for (std::size_t i = 0; i < sparse.size(); ++i)
        logs[i] = std::log(sparse.ys[i] / c0);

    TimeSeries dense;
    dense.xs.resize(n_new);
    dense.ys.resize(n_new);
    const double lo = sparse.xs.front(), hi = sparse.xs.back();
    std::size_t seg = 0;
    for (int i = 0; i < n_new; ++i) {
        const double x = lo + (hi - lo) * i / (n_new - 1);
        while (seg + 2 < sparse.xs.size() && x >= sparse.xs[seg + 1]) ++seg;
        const double w =
            (x - sparse.xs[seg]) / (sparse.xs[seg + 1] - sparse.xs[seg]);
        dense.xs[i] = x;
        dense.ys[i] = c0 * std::exp(logs[seg] + w * (logs[seg + 1] - logs[seg]));
    }
    return add_noise(dense, noise);
}

/// One photolysis component of the kinetics study: reference first-order
/// rate constant plus the synthetic stand-in sampling defaults.
struct EdcComponent {
    std::string name;
    double reference_rate = 0.0;
    double duration = 0.0;
    int sparse_points = 9;
};

/// The eight components with their reference rate constants.  The raw
/// experimental points are not published, so the repo ships synthetic
/// stand-ins generated from these rates; durations keep k*T around 2-4.5
/// per series (EE2 under UVA stays at low conversion).
inline std::vector<EdcComponent> edc_catalog() {
    return {
        {"UVA-E1", 0.22400, 20.0, 9},  {"UVA-E2", 0.07440, 20.0, 9},
        {"UVA-EE2", 0.01710, 20.0, 9}, {"UVA-E3", 0.09590, 20.0, 9},
        {"UVC-E1", 1.30000, 3.5, 9},   {"UVC-E2", 0.30543, 13.0, 9},
        {"UVC-EE2", 0.30543, 13.0, 9}, {"UVC-E3", 0.30543, 13.0, 9},
    };
}

/// Noise-free synthetic sparse series for one component, c0 = 1.
inline TimeSeries edc_sparse_series(const EdcComponent& c) {
    return first_order_series(c.reference_rate, 1.0, c.duration,
                              c.sparse_points);
}

}  // namespace odedisc
