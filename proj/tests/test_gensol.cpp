#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "odedisc/datagen.hpp"
#include "odedisc/gensol.hpp"
#include "odedisc/rng.hpp"

#include "helpers.hpp"

using namespace odedisc;
using Catch::Approx;

namespace {

double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

EigenSpectrum single_mode(int multiplicity, double beta, double gamma) {
    EigenSpectrum s;
    s.modes.push_back({multiplicity, beta, gamma});
    s.source_order = multiplicity * (gamma > 0.0 ? 2 : 1);
    return s;
}

}  // namespace

TEST_CASE("basis matrix pinned examples", "[gensol]") {
    SECTION("constant eigenfunction row") {
        const std::vector<double> xs = {0.0, 1.0, 2.0};
        const auto e = basis_matrix(single_mode(0, 0.0, 0.0), xs,
                                    BasisLayout::PaperFaithful);
        REQUIRE(e.rows() == 1);
        REQUIRE(e.cols() == 3);
        for (int k = 0; k < 3; ++k) CHECK(e(0, k) == Approx(1.0));
    }
    SECTION("double root at x = 0") {
        const std::vector<double> xs = {0.0};
        const auto e = basis_matrix(single_mode(2, -1.0, 0.0), xs,
                                    BasisLayout::PaperFaithful);
        REQUIRE(e.rows() == 1);
        CHECK(e(0, 0) == Approx(1.0));
    }
    SECTION("underdamped spectrum row via direct-evaluation oracle") {
        const auto spectrum = eigen_spectrum({{1.0, 2.0, 4.0}});
        const std::vector<double> xs = {0.0, 1.0};
        const auto e =
            basis_matrix(spectrum, xs, BasisLayout::PaperFaithful);
        REQUIRE(e.rows() == 1);
        CHECK(e(0, 0) == Approx(1.0));
        const double gamma = spectrum.modes[0].imag_part;
        const double oracle =
            2.0 * std::exp(-0.25) * (std::cos(gamma) + std::sin(gamma));
        CHECK(oracle == Approx(2.0674266).epsilon(1e-6));
        CHECK(e(0, 1) == Approx(oracle).epsilon(1e-12));
    }
    SECTION("extended layout splits powers and phase") {
        const auto spectrum = eigen_spectrum({{1.0, 2.0, 4.0}});
        const std::vector<double> xs = {0.0, 0.5, 1.0};
        const auto e =
            basis_matrix(spectrum, xs, BasisLayout::ExtendedPhase);
        // one complex mode, multiplicity 1: j in {0,1} x {cos,sin}
        REQUIRE(e.rows() == 4);
        CHECK(e(0, 0) == Approx(1.0));  // cos row at x=0
        CHECK(e(1, 0) == Approx(0.0));  // sin row at x=0
    }
    SECTION("overflowing entries raise BasisOverflow") {
        const std::vector<double> xs = {0.0, 400.0};
        CHECK_THROWS_AS(basis_matrix(single_mode(0, 10.0, 0.0), xs,
                                     BasisLayout::PaperFaithful),
                        BasisOverflow);
    }
}

TEST_CASE("amplitude fitting", "[gensol]") {
    SECTION("constant fit") {
        Eigen::MatrixXd e(1, 3);
        e << 1.0, 1.0, 1.0;
        const std::vector<double> ys = {2.0, 2.0, 2.0};
        const auto d = fit_amplitudes(e, ys);
        REQUIRE(d.size() == 1);
        CHECK(d(0) == Approx(2.0));
    }
    SECTION("exact two-exponential reproduction of the overdamped series") {
        SpringParams p;
        p.mass = 2.0;
        p.damping = 4.0;
        p.stiffness = 1.0;
        p.x0 = 0.4;
        p.v0 = -0.6;
        p.duration = 20.0;
        p.n_points = 200;
        const TimeSeries data = spring_mass_series(p);
        const double r1 = -0.2928932188134524;
        const double r2 = -1.7071067811865475;
        Eigen::MatrixXd e(2, data.size());
        for (std::size_t k = 0; k < data.size(); ++k) {
            e(0, k) = std::exp(r1 * data.xs[k]);
            e(1, k) = std::exp(r2 * data.xs[k]);
        }
        const auto d = fit_amplitudes(e, data.ys);
        Eigen::Map<const Eigen::VectorXd> y(data.ys.data(), data.ys.size());
        const double err =
            (e.transpose() * d - y).squaredNorm() / data.size();
        CHECK(err <= 1e-12);
    }
    SECTION("duplicate rows split amplitude equally (minimum norm)") {
        Eigen::MatrixXd e(2, 3);
        e << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0;
        const std::vector<double> ys = {2.0, 2.0, 2.0};
        const auto d = fit_amplitudes(e, ys);
        REQUIRE(d.size() == 2);
        CHECK(d(0) == Approx(1.0));
        CHECK(d(1) == Approx(1.0));
    }
    SECTION("all-zero basis is degenerate") {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 4);
        const std::vector<double> ys = {1.0, 2.0, 3.0, 4.0};
        CHECK_THROWS_AS(fit_amplitudes(e, ys), DegenerateBasis);
    }
    SECTION("column count mismatch is rejected") {
        Eigen::MatrixXd e(1, 3);
        e << 1.0, 1.0, 1.0;
        const std::vector<double> ys = {1.0, 2.0};
        CHECK_THROWS_AS(fit_amplitudes(e, ys), DegenerateBasis);
    }
}

TEST_CASE("prediction", "[gensol]") {
    SECTION("zero amplitudes predict zero") {
        GeneralSolutionModel m;
        m.spectrum = single_mode(1, -0.5, 0.0);
        m.amplitudes = {0.0};
        m.basis_layout = BasisLayout::PaperFaithful;
        for (double v : predict(m, std::vector<double>{0.0, 1.0, 5.0}))
            CHECK(v == 0.0);
    }
    SECTION("constant mode with D = 5") {
        GeneralSolutionModel m;
        m.spectrum = single_mode(0, 0.0, 0.0);
        m.amplitudes = {5.0};
        const auto y = predict(m, std::vector<double>{0.0, 7.0});
        CHECK(y[0] == Approx(5.0));
        CHECK(y[1] == Approx(5.0));
    }
    SECTION("critical-damped series is exactly representable (extended)") {
        SpringParams p;
        p.mass = 1.0;
        p.damping = 2.0;
        p.stiffness = 1.0;
        p.x0 = 0.4;
        p.v0 = -0.6;
        p.duration = 20.0;
        p.n_points = 500;
        const TimeSeries data = spring_mass_series(p);
        const auto model = fit_general_solution(data, {{1.0, 2.0, 1.0}},
                                                BasisLayout::ExtendedPhase);
        const auto y = predict(model, data.xs);
        CHECK(mse(y, data.ys) <= 1e-10);
    }
}

TEST_CASE("fitness contract", "[gensol]") {
    SECTION("exact representability within the model family") {
        // generate the data from the paper-faithful family itself
        GeneralSolutionModel m;
        m.spectrum = eigen_spectrum({{1.0, 2.0, 1.0}});
        m.amplitudes = {0.7};
        m.basis_layout = BasisLayout::PaperFaithful;
        TimeSeries data;
        for (int i = 0; i < 300; ++i) data.xs.push_back(20.0 * i / 299.0);
        data.ys = predict(m, data.xs);
        CHECK(fitness(data, {{1.0, 2.0, 1.0}}, BasisLayout::PaperFaithful) <=
              1e-12);
    }
    SECTION("zero leading coefficient maps to the penalty") {
        TimeSeries data;
        for (int i = 0; i < 10; ++i) {
            data.xs.push_back(i);
            data.ys.push_back(std::exp(-0.1 * i));
        }
        CHECK(fitness(data, {{1.0, 2.0, 0.0}}, BasisLayout::PaperFaithful) ==
              kFitnessPenalty);
    }
    SECTION("noisy underdamped data scored with the true coefficients") {
        SpringParams p;
        p.mass = 4.0;
        p.damping = 2.0;
        p.stiffness = 1.0;
        p.x0 = 0.4;
        p.v0 = -0.6;
        p.duration = 20.0;
        p.n_points = 1000;
        NoiseSpec noise;
        noise.seed = 7;
        const TimeSeries data = add_noise(spring_mass_series(p), noise);
        // the extended layout spans the true phase, so the loss floor is
        // the projected-noise level
        CHECK(fitness(data, {{1.0, 2.0, 4.0}}, BasisLayout::ExtendedPhase) <=
              1e-6);
    }
}

TEST_CASE("fitness totality and non-negativity", "[gensol]") {
    TimeSeries data;
    for (int i = 0; i < 50; ++i) {
        data.xs.push_back(0.5 * i);
        data.ys.push_back(std::sin(0.3 * i));
    }
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int order = 1 + static_cast<int>(rng.uniform01() * 6);
        std::vector<double> coeffs(order + 1);
        for (auto& c : coeffs) c = rng.uniform(-10.0, 10.0);
        const auto layout = trial % 2 == 0 ? BasisLayout::PaperFaithful
                                           : BasisLayout::ExtendedPhase;
        const double loss = fitness(data, {coeffs}, layout);
        CHECK(std::isfinite(loss));
        CHECK(loss >= 0.0);
    }
}

TEST_CASE("least-squares optimality under perturbation", "[gensol]") {
    Rng rng(4242);
    for (int instance = 0; instance < 100; ++instance) {
        const int rows = 2 + static_cast<int>(rng.uniform01() * 3);
        const int cols = 30;
        Eigen::MatrixXd e(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) e(r, c) = rng.uniform(-2.0, 2.0);
        std::vector<double> ys(cols);
        for (auto& y : ys) y = rng.uniform(-2.0, 2.0);

        const Eigen::VectorXd d = fit_amplitudes(e, ys);
        Eigen::Map<const Eigen::VectorXd> y(ys.data(), ys.size());
        const double base = (e.transpose() * d - y).norm();

        Eigen::VectorXd delta(rows);
        for (int r = 0; r < rows; ++r) delta(r) = rng.gaussian();
        delta *= 1e-3 / delta.norm();
        const double perturbed = (e.transpose() * (d + delta) - y).norm();
        CHECK(perturbed >= base - 1e-12);
    }
}

TEST_CASE("layouts agree for simple real spectra", "[gensol]") {
    // all gamma = 0 and alpha = 0: both layouts emit exactly one
    // exponential row per mode
    Rng rng(5150);
    for (int trial = 0; trial < 50; ++trial) {
        EigenSpectrum s;
        const int n_modes = 1 + static_cast<int>(rng.uniform01() * 3);
        for (int q = 0; q < n_modes; ++q)
            s.modes.push_back({0, rng.uniform(-1.0, 0.2), 0.0});
        s.source_order = n_modes;

        TimeSeries data;
        for (int i = 0; i < 40; ++i) {
            data.xs.push_back(0.25 * i);
            data.ys.push_back(rng.uniform(-1.0, 1.0));
        }
        const auto e_pf =
            basis_matrix(s, data.xs, BasisLayout::PaperFaithful);
        const auto e_ep =
            basis_matrix(s, data.xs, BasisLayout::ExtendedPhase);
        REQUIRE(e_pf.rows() == e_ep.rows());

        GeneralSolutionModel pf{s, {}, BasisLayout::PaperFaithful};
        GeneralSolutionModel ep{s, {}, BasisLayout::ExtendedPhase};
        const Eigen::VectorXd d_pf = fit_amplitudes(e_pf, data.ys);
        const Eigen::VectorXd d_ep = fit_amplitudes(e_ep, data.ys);
        pf.amplitudes.assign(d_pf.data(), d_pf.data() + d_pf.size());
        ep.amplitudes.assign(d_ep.data(), d_ep.data() + d_ep.size());
        const auto y_pf = predict(pf, data.xs);
        const auto y_ep = predict(ep, data.xs);
        for (std::size_t k = 0; k < y_pf.size(); ++k)
            CHECK(y_pf[k] == Approx(y_ep[k]).margin(1e-12));
    }
}
