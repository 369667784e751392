#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "odedisc/io.hpp"
#include "odedisc/pipeline.hpp"

using namespace odedisc;
using Catch::Approx;

TEST_CASE("csv round trip is bit exact", "[pipeline]") {
    Rng rng(1007);
    TimeSeries ts;
    double x = -50.0;
    for (int i = 0; i < 500; ++i) {
        x += rng.uniform01() * 3.0 + 1e-9;
        ts.xs.push_back(x);
        ts.ys.push_back((rng.uniform01() - 0.5) *
                        std::pow(10.0, rng.uniform(-12.0, 12.0)));
    }
    std::ostringstream out;
    write_series_csv(ts, out);
    std::istringstream in(out.str());
    const TimeSeries back = read_series_csv(in);
    REQUIRE(back.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(back.xs[i] == ts.xs[i]);
        CHECK(back.ys[i] == ts.ys[i]);
    }
}

TEST_CASE("csv rejects malformed input", "[pipeline]") {
    {
        std::istringstream in("a,b\n1,2\n");
        CHECK_THROWS_AS(read_series_csv(in), InvalidInput);
    }
    {
        std::istringstream in("x,y\n1.0;2.0\n");
        CHECK_THROWS_AS(read_series_csv(in), InvalidInput);
    }
    {
        std::istringstream in("x,y\n1.0,nope\n2.0,1.0\n");
        CHECK_THROWS_AS(read_series_csv(in), InvalidInput);
    }
    {
        // non-increasing xs
        std::istringstream in("x,y\n1.0,2.0\n1.0,3.0\n");
        CHECK_THROWS_AS(read_series_csv(in), InvalidInput);
    }
}

TEST_CASE("run config validation", "[pipeline]") {
    RunConfig cfg;
    cfg.candidate_order = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = RunConfig{};
    cfg.spline_tau = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = RunConfig{};
    cfg.one_tol = 1e-6;  // below zero_tol
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    CHECK_NOTHROW(RunConfig{}.validate());
    CHECK_NOTHROW(edc_run_config().validate());
}

TEST_CASE("spring cell catalog", "[pipeline]") {
    CHECK(spring_cell_params("underdamped").mass == 4.0);
    CHECK(spring_cell_params("underdamped").damping == 2.0);
    CHECK(spring_cell_params("critical").mass == 1.0);
    CHECK(spring_cell_params("overdamped").damping == 4.0);
    CHECK(spring_true_coefficients("overdamped") ==
          std::vector<double>{1.0, 4.0, 2.0});
    CHECK_THROWS_AS(spring_cell_params("bouncy"), InvalidInput);
}

TEST_CASE("discover is deterministic and self-consistent", "[pipeline][slow]") {
    const TimeSeries data = spring_mass_series(spring_cell_params("overdamped"));

    RunConfig cfg;
    cfg.ga.population_size = 40;
    cfg.ga.max_generations = 30;
    cfg.ga.seed = 5;
    cfg.dense_grid_points = 800;

    const RunReport a = discover(data, cfg);
    const RunReport b = discover(data, cfg);

    SECTION("reports are byte-identical with timings stripped") {
        const std::string ja = report_to_json(a, false).dump();
        const std::string jb = report_to_json(b, false).dump();
        CHECK(ja == jb);
    }
    SECTION("recorded best vector re-scores to the recorded loss") {
        const double rescored =
            fitness(data, a.ga.best_coefficients, cfg.basis_layout);
        CHECK(std::abs(rescored - a.ga.best_loss) <= 1e-12);
        CHECK(a.general_solution_mse == Approx(a.ga.best_loss).margin(1e-12));
    }
    SECTION("report carries finite diagnostics and provenance") {
        CHECK(a.input_points == 1000);
        CHECK(a.input_checksum.size() == 16);
        CHECK(a.input_checksum == series_checksum(data));
        CHECK(std::isfinite(a.spline_max_phi));
        CHECK(a.spline_knot_count > 0);
        CHECK(a.discovered.coefficients.coeffs.size() == 6);
        for (double v : a.discovered.raw_null_vector) CHECK(std::isfinite(v));
    }
}

TEST_CASE("constant-zero input surfaces the nullspace error", "[pipeline]") {
    TimeSeries zeros;
    for (int i = 0; i < 64; ++i) {
        zeros.xs.push_back(i * 0.1);
        zeros.ys.push_back(0.0);
    }
    RunConfig cfg;
    cfg.ga.population_size = 10;
    cfg.ga.max_generations = 5;
    cfg.ga.seed = 3;
    cfg.dense_grid_points = 200;
    try {
        discover(zeros, cfg);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "nullspace");
        CHECK(std::string(e.what()).find("nullspace") != std::string::npos);
    }
}

TEST_CASE("sparsity map transform", "[pipeline]") {
    RunReport a;
    a.config.candidate_order = 5;
    a.discovered.coefficients.coeffs = {1.0, 2.1, 4.5, 1e-6, 0.0, 0.0};
    RunReport b;
    b.config.candidate_order = 5;
    b.discovered.coefficients.coeffs = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};

    SECTION("spring tolerances saturate everything above one_tol") {
        const auto rows = sparsity_map({a}, 1e-4, 0.98);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0] == std::vector<double>{1.0, 1.0, 1.0, 0.0, 0.0, 0.0});
    }
    SECTION("one-hot row for a lone pivot") {
        const auto rows = sparsity_map({b}, 1e-4, 0.98);
        CHECK(rows[0] == std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    }
    SECTION("kinetics tolerance maps the pivot column to one") {
        RunReport k;
        k.config.candidate_order = 7;
        k.discovered.coefficients.coeffs = {0.224, 1.0, 0.002, 0.0,
                                            0.0,   0.0, 0.0,   0.0};
        const auto rows = sparsity_map({k}, 1e-4, 0.1);
        CHECK(rows[0][1] == 1.0);   // pivot saturates
        CHECK(rows[0][0] == 1.0);   // 0.224 > 0.1 saturates too
        CHECK(rows[0][2] > 0.0);    // second-order term is mid-range
        CHECK(rows[0][2] < 0.05);
        CHECK(rows[0][3] == 0.0);
    }
    SECTION("mismatched orders are rejected") {
        RunReport k;
        k.config.candidate_order = 7;
        k.discovered.coefficients.coeffs.assign(8, 0.0);
        CHECK_THROWS_AS(sparsity_map({a, k}), InvalidInput);
    }
}

TEST_CASE("report json shape", "[pipeline]") {
    RunReport r;
    r.label = "demo";
    r.config = RunConfig{};
    r.ga.best_coefficients.coeffs = {1.0, 2.0};
    r.ga.best_loss = 0.5;
    r.ga.loss_history = {1.0, 0.5};
    r.discovered.coefficients.coeffs = {1.0, 0.5};
    r.discovered.raw_null_vector = {0.89, 0.45};
    r.discovered.sparsity_mask = {1.0, 0.5};
    r.timings.total_ms = 12.0;

    const auto with = report_to_json(r, true);
    const auto without = report_to_json(r, false);
    CHECK(with.contains("timings_ms"));
    CHECK_FALSE(without.contains("timings_ms"));
    // fixed key ordering: config first, then input, ga, ...
    auto it = with.begin();
    CHECK(it.key() == "label");
    ++it;
    CHECK(it.key() == "config");
    ++it;
    CHECK(it.key() == "input");
    const std::string dumped = with.dump();
    CHECK(dumped.find("\"basis_layout\":\"extended-phase\"") !=
          std::string::npos);
}
