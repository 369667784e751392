/// \file pipeline.hpp
/// \brief Full discovery chain (GA -> general solution -> spline -> null
///        space), benchmark drivers, and report emission.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odedisc/bspline.hpp"
#include "odedisc/datagen.hpp"
#include "odedisc/errors.hpp"
#include "odedisc/evolve.hpp"
#include "odedisc/gensol.hpp"
#include "odedisc/io.hpp"
#include "odedisc/nullspace.hpp"

namespace odedisc {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
    int candidate_order = 5;
    GAConfig ga;
    BasisLayout basis_layout = BasisLayout::ExtendedPhase;
    double spline_tau = 1e-6;
    int dense_grid_points = 2000;
    int initial_interior_knots = 8;
    int max_refine_rounds = 12;
    int n_gradient_samples = 1000;
    double rank_tol = kDefaultRankTol;
    PivotRule pivot = PivotRule::lowest();
    double zero_tol = kDefaultZeroTol;
    double one_tol = kSpringOneTol;

    void validate() const {
        if (candidate_order < 1)
            throw InvalidConfig("candidate_order must be >= 1");
        ga.validate();
        if (!(spline_tau > 0.0)) throw InvalidConfig("spline_tau must be > 0");
        if (dense_grid_points < 2 * (candidate_order + 1))
            throw InvalidConfig("dense grid too coarse for the spline degree");
        if (n_gradient_samples < candidate_order + 1)
            throw InvalidConfig("need at least P+1 gradient samples");
        if (initial_interior_knots < 0 || max_refine_rounds < 0)
            throw InvalidConfig("knot/refinement counts must be >= 0");
        if (!(zero_tol > 0.0) || !(one_tol > zero_tol))
            throw InvalidConfig("need 0 < zero_tol < one_tol");
        if (!(rank_tol > 0.0)) throw InvalidConfig("rank_tol must be > 0");
    }
};

/// Spring-study defaults (candidate order 5, spring sparsity tolerances).
inline RunConfig spring_run_config() { return RunConfig{}; }

/// Kinetics-study defaults: order 7, pivot at the first derivative,
/// one_tol 0.1.
inline RunConfig edc_run_config() {
    RunConfig cfg;
    cfg.candidate_order = 7;
    cfg.pivot = PivotRule::order(1);
    cfg.one_tol = kKineticsOneTol;
    return cfg;
}

struct StageTimings {
    double ga_ms = 0.0;
    double gensol_ms = 0.0;
    double spline_ms = 0.0;
    double nullspace_ms = 0.0;
    double total_ms = 0.0;
};

struct RunReport {
    std::string label = "run";
    RunConfig config;
    std::size_t input_points = 0;
    double input_x_min = 0.0;
    double input_x_max = 0.0;
    std::string input_checksum;
    GAResult ga;
    double general_solution_mse = 0.0;
    GeneralSolutionModel model;
    std::vector<double> dense_xs;  ///< prediction grid handed to the spline
    std::vector<double> dense_ys;
    SplineModel spline;            ///< refined spline (summarized in JSON)
    int spline_knot_count = 0;
    int refine_rounds = 0;
    bool refine_converged = false;
    double spline_max_phi = 0.0;
    std::vector<double> spline_residual_history;
    DiscoveredODE discovered;
    StageTimings timings;
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

template <typename F>
auto run_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(stage, e.what());
    }
}

}  // namespace detail

/// Runs the whole discovery chain on one series.  Deterministic for a
/// fixed config seed; stage failures are rethrown as PipelineError with
/// the stage name.
inline RunReport discover(const TimeSeries& data, const RunConfig& cfg) {
    const auto t_total = std::chrono::steady_clock::now();
    RunReport report;
    report.config = cfg;

    detail::run_stage("input", [&] {
        cfg.validate();
        validate_series(data);
        return 0;
    });
    report.input_points = data.size();
    report.input_x_min = data.xs.front();
    report.input_x_max = data.xs.back();
    report.input_checksum = series_checksum(data);

    auto t0 = std::chrono::steady_clock::now();
    report.ga = detail::run_stage("ga", [&] {
        return run_ga(data, cfg.candidate_order, cfg.ga, cfg.basis_layout);
    });
    report.timings.ga_ms = detail::ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    TimeSeries dense;
    detail::run_stage("gensol", [&] {
        report.model = fit_general_solution(data, report.ga.best_coefficients,
                                            cfg.basis_layout);
        const auto fitted = predict(report.model, data.xs);
        double sse = 0.0;
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double r = fitted[k] - data.ys[k];
            sse += r * r;
        }
        report.general_solution_mse = sse / static_cast<double>(data.size());

        dense.xs.resize(cfg.dense_grid_points);
        const double lo = data.xs.front(), hi = data.xs.back();
        for (int i = 0; i < cfg.dense_grid_points; ++i)
            dense.xs[i] = lo + (hi - lo) * i / (cfg.dense_grid_points - 1);
        dense.ys = predict(report.model, dense.xs);
        return 0;
    });
    report.timings.gensol_ms = detail::ms_since(t0);

    report.dense_xs = dense.xs;
    report.dense_ys = dense.ys;

    t0 = std::chrono::steady_clock::now();
    detail::run_stage("bspline", [&] {
        const int degree = cfg.candidate_order;
        const KnotVector kv =
            uniform_knots(dense.xs.front(), dense.xs.back(), degree,
                          degree + 1 + cfg.initial_interior_knots);
        const SplineModel initial = fit_spline(dense.xs, dense.ys, kv);
        RefineResult refined = refine_spline(dense.xs, dense.ys, initial,
                                             cfg.spline_tau,
                                             cfg.max_refine_rounds);
        report.spline = std::move(refined.model);
        report.spline_knot_count =
            static_cast<int>(report.spline.knot_vector.knots.size());
        report.refine_rounds = refined.rounds;
        report.refine_converged = refined.converged;
        report.spline_max_phi = refined.max_phi;
        report.spline_residual_history = std::move(refined.total_sq_residuals);
        return 0;
    });
    report.timings.spline_ms = detail::ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    detail::run_stage("nullspace", [&] {
        const GradientMatrix g = gradient_matrix(
            report.spline, cfg.candidate_order, cfg.n_gradient_samples);
        const DiscoveredODE raw = null_coefficients(g, cfg.rank_tol);
        report.discovered =
            normalize_and_sparsify(raw, cfg.pivot, cfg.zero_tol, cfg.one_tol);
        return 0;
    });
    report.timings.nullspace_ms = detail::ms_since(t0);
    report.timings.total_ms = detail::ms_since(t_total);
    return report;
}

// -- spring benchmark ---------------------------------------------------------

/// Study configuration for one damping regime: m, b, k with shared initial
/// conditions x0 = 0.4, v0 = -0.6, duration 20 s, 1000 points.
inline SpringParams spring_cell_params(const std::string& regime) {
    SpringParams p;
    p.x0 = 0.4;
    p.v0 = -0.6;
    p.duration = 20.0;
    p.n_points = 1000;
    if (regime == "overdamped") {
        p.mass = 2.0;
        p.damping = 4.0;
        p.stiffness = 1.0;
    } else if (regime == "critical") {
        p.mass = 1.0;
        p.damping = 2.0;
        p.stiffness = 1.0;
    } else if (regime == "underdamped") {
        p.mass = 4.0;
        p.damping = 2.0;
        p.stiffness = 1.0;
    } else {
        throw InvalidInput("unknown regime: " + regime);
    }
    return p;
}

/// Ground-truth coefficient vector (k, b, m) for a regime.
inline std::vector<double> spring_true_coefficients(const std::string& regime) {
    const SpringParams p = spring_cell_params(regime);
    return {p.stiffness, p.damping, p.mass};
}

inline const std::vector<std::string>& spring_regimes() {
    static const std::vector<std::string> regimes = {"overdamped", "critical",
                                                     "underdamped"};
    return regimes;
}

struct SpringCell {
    std::string regime;
    bool noisy = false;
    bool ok = false;
    std::string error;
    RunReport report;
};

struct SpringBenchmark {
    std::uint64_t base_seed = 0;
    std::vector<SpringCell> cells;
};

/// All six (regime x noise) cells.  Seeds derive from the base seed per
/// cell index (noise stream and GA stream offset apart), so the whole
/// table is reproducible from one number.  Cell failures are recorded and
/// the run continues.
inline SpringBenchmark benchmark_spring(const RunConfig& prototype,
                                        std::uint64_t base_seed) {
    SpringBenchmark bench;
    bench.base_seed = base_seed;
    int index = 0;
    for (const auto& regime : spring_regimes()) {
        for (bool noisy : {false, true}) {
            SpringCell cell;
            cell.regime = regime;
            cell.noisy = noisy;
            try {
                TimeSeries data = spring_mass_series(spring_cell_params(regime));
                if (noisy) {
                    NoiseSpec noise;
                    noise.seed = base_seed + index;
                    data = add_noise(data, noise);
                }
                RunConfig cfg = prototype;
                cfg.ga.seed = base_seed + 1000 + index;
                cell.report = discover(data, cfg);
                cell.report.label =
                    regime + (noisy ? "/noisy" : "/noise-free");
                cell.ok = true;
            } catch (const Error& e) {
                cell.error = e.what();
            }
            bench.cells.push_back(std::move(cell));
            ++index;
        }
    }
    return bench;
}

// -- kinetics benchmark -------------------------------------------------------

struct EdcRow {
    EdcComponent component;
    bool ok = false;
    std::string error;
    double recovered_rate = 0.0;
    double squared_error = 0.0;
    RunReport report;
};

struct EdcBenchmark {
    std::uint64_t base_seed = 0;
    std::vector<EdcRow> rows;
};

/// Synthetic sparse series per component, log-linear augmentation to 1000
/// points with scale-0.001 noise, then discovery with the kinetics
/// defaults.  The zeroth-order coefficient of the normalized ODE is the
/// recovered rate constant.
inline EdcBenchmark benchmark_edc(const RunConfig& prototype,
                                  std::uint64_t base_seed) {
    EdcBenchmark bench;
    bench.base_seed = base_seed;
    int index = 0;
    for (const auto& component : edc_catalog()) {
        EdcRow row;
        row.component = component;
        try {
            const TimeSeries sparse = edc_sparse_series(component);
            NoiseSpec noise;
            noise.seed = base_seed + index;
            const TimeSeries data = augment_log_linear(sparse, 1000, 1.0, noise);
            RunConfig cfg = prototype;
            cfg.ga.seed = base_seed + 1000 + index;
            row.report = discover(data, cfg);
            row.report.label = component.name;
            row.recovered_rate = row.report.discovered.coefficients.coeffs.at(0);
            const double diff = component.reference_rate - row.recovered_rate;
            row.squared_error = diff * diff;
            row.ok = true;
        } catch (const Error& e) {
            row.error = e.what();
        }
        bench.rows.push_back(std::move(row));
        ++index;
    }
    return bench;
}

// -- sparsity map -------------------------------------------------------------

/// Threshold/normalize transform of each report's coefficients, stacked
/// one row per report.  All reports must share the candidate order.
inline std::vector<std::vector<double>> sparsity_map(
    const std::vector<RunReport>& reports, double zero_tol = kDefaultZeroTol,
    double one_tol = kSpringOneTol) {
    std::vector<std::vector<double>> rows;
    for (const auto& report : reports) {
        if (report.config.candidate_order != reports.front().config.candidate_order)
            throw InvalidInput("sparsity map needs a shared candidate order");
        std::vector<double> row;
        for (double c : report.discovered.coefficients.coeffs) {
            const double mag = std::abs(c);
            if (mag < zero_tol)
                row.push_back(0.0);
            else if (mag > one_tol)
                row.push_back(1.0);
            else
                row.push_back((mag - zero_tol) / (one_tol - zero_tol));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// -- serialization ------------------------------------------------------------

inline const char* layout_name(BasisLayout layout) {
    return layout == BasisLayout::PaperFaithful ? "paper-faithful"
                                                : "extended-phase";
}

inline BasisLayout layout_from_name(const std::string& name) {
    if (name == "paper-faithful") return BasisLayout::PaperFaithful;
    if (name == "extended-phase") return BasisLayout::ExtendedPhase;
    throw InvalidInput("unknown basis layout: " + name);
}

inline ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["candidate_order"] = cfg.candidate_order;
    j["basis_layout"] = layout_name(cfg.basis_layout);
    j["spline_tau"] = cfg.spline_tau;
    j["dense_grid_points"] = cfg.dense_grid_points;
    j["initial_interior_knots"] = cfg.initial_interior_knots;
    j["max_refine_rounds"] = cfg.max_refine_rounds;
    j["n_gradient_samples"] = cfg.n_gradient_samples;
    j["rank_tol"] = cfg.rank_tol;
    j["pivot"] = ordered_json{
        {"mode", cfg.pivot.lowest_surviving ? "lowest-surviving" : "order-k"},
        {"k", cfg.pivot.order_k}};
    j["zero_tol"] = cfg.zero_tol;
    j["one_tol"] = cfg.one_tol;
    j["ga"] = ordered_json{{"population_size", cfg.ga.population_size},
                           {"max_generations", cfg.ga.max_generations},
                           {"function_tolerance", cfg.ga.function_tolerance},
                           {"lower_bound", cfg.ga.lower_bound},
                           {"upper_bound", cfg.ga.upper_bound},
                           {"crossover_rate", cfg.ga.crossover_rate},
                           {"mutation_rate", cfg.ga.mutation_rate},
                           {"elite_fraction", cfg.ga.elite_fraction},
                           {"seed", cfg.ga.seed}};
    return j;
}

inline ordered_json report_to_json(const RunReport& r,
                                   bool include_timings = true) {
    ordered_json j;
    j["label"] = r.label;
    j["config"] = config_to_json(r.config);
    j["input"] = ordered_json{{"points", r.input_points},
                              {"x_min", r.input_x_min},
                              {"x_max", r.input_x_max},
                              {"checksum", r.input_checksum}};
    j["ga"] = ordered_json{{"best_loss", r.ga.best_loss},
                           {"generations_run", r.ga.generations_run},
                           {"best_coefficients", r.ga.best_coefficients.coeffs},
                           {"loss_history", r.ga.loss_history}};
    ordered_json modes = ordered_json::array();
    for (const auto& m : r.model.spectrum.modes)
        modes.push_back(ordered_json{{"multiplicity", m.multiplicity},
                                     {"real", m.real_part},
                                     {"imag", m.imag_part}});
    j["general_solution"] = ordered_json{{"mse", r.general_solution_mse},
                                         {"modes", modes},
                                         {"amplitudes", r.model.amplitudes}};
    j["spline"] = ordered_json{
        {"degree", r.config.candidate_order},
        {"knot_count", r.spline_knot_count},
        {"refine_rounds", r.refine_rounds},
        {"converged", r.refine_converged},
        {"max_phi", r.spline_max_phi},
        {"total_sq_residuals", r.spline_residual_history}};
    j["discovered"] =
        ordered_json{{"coefficients", r.discovered.coefficients.coeffs},
                     {"raw_null_vector", r.discovered.raw_null_vector},
                     {"residual", r.discovered.residual},
                     {"rank_estimate", r.discovered.rank_estimate},
                     {"sparsity_mask", r.discovered.sparsity_mask}};
    if (include_timings)
        j["timings_ms"] = ordered_json{{"ga", r.timings.ga_ms},
                                       {"gensol", r.timings.gensol_ms},
                                       {"spline", r.timings.spline_ms},
                                       {"nullspace", r.timings.nullspace_ms},
                                       {"total", r.timings.total_ms}};
    return j;
}

inline ordered_json spring_benchmark_to_json(const SpringBenchmark& b,
                                             bool include_timings = true) {
    ordered_json j;
    j["benchmark"] = "spring";
    j["base_seed"] = b.base_seed;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : b.cells) {
        ordered_json c;
        c["regime"] = cell.regime;
        c["noisy"] = cell.noisy;
        c["ok"] = cell.ok;
        if (cell.ok)
            c["report"] = report_to_json(cell.report, include_timings);
        else
            c["error"] = cell.error;
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    return j;
}

inline ordered_json edc_benchmark_to_json(const EdcBenchmark& b,
                                          bool include_timings = true) {
    ordered_json j;
    j["benchmark"] = "edc";
    j["base_seed"] = b.base_seed;
    ordered_json rows = ordered_json::array();
    for (const auto& row : b.rows) {
        ordered_json c;
        c["component"] = row.component.name;
        c["reference_rate"] = row.component.reference_rate;
        c["ok"] = row.ok;
        if (row.ok) {
            c["recovered_rate"] = row.recovered_rate;
            c["squared_error"] = row.squared_error;
            c["report"] = report_to_json(row.report, include_timings);
        } else {
            c["error"] = row.error;
        }
        rows.push_back(std::move(c));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot open for writing: " + path);
    os << j.dump(2) << '\n';
}

/// Dense-grid curves sidecar: x, fitted general solution, spline value.
inline void write_curves_csv(const RunReport& r, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot open for writing: " + path);
    os << "x,y_gensol,y_spline\n";
    for (std::size_t i = 0; i < r.dense_xs.size(); ++i)
        os << format_double(r.dense_xs[i]) << ','
           << format_double(r.dense_ys[i]) << ','
           << format_double(r.spline.evaluate(r.dense_xs[i])) << '\n';
}

/// Sparsity-map sidecar: one labeled row per report, one column per order.
inline void write_sparsity_csv(const std::vector<std::string>& labels,
                               const std::vector<std::vector<double>>& rows,
                               const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot open for writing: " + path);
    os << "label";
    if (!rows.empty())
        for (std::size_t p = 0; p < rows.front().size(); ++p)
            os << ",order_" << p;
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << labels[i];
        for (double v : rows[i]) os << ',' << format_double(v);
        os << '\n';
    }
}

}  // namespace odedisc
