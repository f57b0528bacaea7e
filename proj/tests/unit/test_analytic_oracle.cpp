#include "fixtures.hpp"
#include "pdcs/analytic_oracle.hpp"
#include "pdcs/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace pdcs;

namespace {
PairSystem pair(double delta, double nu, double eta = 1.0 / 1.01)
{
    PairSystem ps;
    ps.delta = delta;
    ps.nu_mag = nu;
    ps.eta = eta;
    return ps;
}
} // namespace

TEST_CASE("zero detuning closed form")
{
    const double eta = 1.0 / 1.01, nu = 0.95;
    const VariancePair v0 = opa_output_spectrum(pair(0.0, nu), 0.0);
    CHECK(v0.min == doctest::Approx(1.0 - eta * 4 * nu / ((1 + nu) * (1 + nu))).epsilon(1e-12));
    CHECK(v0.min == doctest::Approx(0.010552).epsilon(1e-4));
    CHECK(to_db(v0.min) == doctest::Approx(-19.77).epsilon(1e-3));
    for (double w : {0.3, 1.0, 4.0, 11.0}) {
        const VariancePair v = opa_output_spectrum(pair(0.0, nu), w);
        CHECK(v.min == doctest::Approx(1.0 - eta * 4 * nu / ((1 + nu) * (1 + nu) + w * w)).epsilon(1e-12));
        CHECK(v.max == doctest::Approx(1.0 + eta * 4 * nu / ((1 - nu) * (1 - nu) + w * w)).epsilon(1e-12));
    }
}

TEST_CASE("no drive is vacuum")
{
    const VariancePair v = opa_output_spectrum(pair(2.0, 0.0), 1.0);
    CHECK(v.min == doctest::Approx(1.0));
    CHECK(v.max == doctest::Approx(1.0));
}

TEST_CASE("lossless output is minimum uncertainty")
{
    for (double d : {0.0, 0.4, 3.0})
        for (double nu : {0.2, 0.7, 0.99})
            for (double w : {0.0, 0.5, 2.0, 9.0}) {
                const VariancePair v = opa_output_spectrum(pair(d, nu, 1.0), w);
                CHECK(v.min * v.max == doctest::Approx(1.0).epsilon(1e-10));
            }
}

TEST_CASE("threshold and efficiency are validated")
{
    CHECK_THROWS_AS(opa_output_spectrum(pair(0.0, 1.0), 0.0), ValidationError);
    CHECK_THROWS_AS(opa_output_spectrum(pair(0.0, 1.3), 0.0), ValidationError);
    CHECK_THROWS_AS(opa_output_spectrum(pair(0.0, 0.5, 0.0), 0.0), ValidationError);
}

TEST_CASE("approaching threshold reaches the loss floor")
{
    const double floor = 0.01 / 1.01;
    double last = 1.0;
    for (double nu : {0.9, 0.99, 0.999, 0.9999}) {
        const double v = opa_output_spectrum(pair(0.0, nu), 0.0).min;
        CHECK(v < last);
        CHECK(v >= floor);
        last = v;
    }
    CHECK(std::abs(last - floor) < 1e-6);
}

TEST_CASE("squeezing weakens monotonically with detuning")
{
    double last = 0.0;
    for (double d : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
        const double v = opa_output_spectrum(pair(d, 0.95), 0.0).min;
        CHECK(v > last);
        last = v;
        const double vn = opa_output_spectrum(pair(-d, 0.95), 0.0).min;
        CHECK(vn == doctest::Approx(v));
    }
}

TEST_CASE("phase-matched detuning")
{
    const NormalizedParams p = fixtures::device(0.0, 0.95);
    CHECK(phase_matched_detuning(0, p) == 0.0);
    CHECK(phase_matched_detuning(40, p) == doctest::Approx(-(3.0 * 800 - 9.87e-3 * std::pow(40.0, 4) / 24)).epsilon(1e-3));
    CHECK(std::abs(phase_matched_detuning(40, p) + 1347.1) < 1.0);
    for (int mu = 1; mu < 60; ++mu)
        CHECK(phase_matched_detuning(mu, p) < 0.0);
}

TEST_CASE("numerical pipeline matches the pair oracle below threshold")
{
    for (double delta : {0.0, -3.0, 2.5}) {
        const NormalizedParams p = fixtures::small_device(delta, 0.9);
        const Eigen::MatrixXd M = below_threshold_M(p);
        for (double w : {0.0, 0.8, 5.0}) {
            const FrequencyDecomposition d = decompose(M, LossMatrix::from(p), w);
            const std::vector<double> oracle = below_threshold_levels(p, w);
            REQUIRE(oracle.size() == static_cast<std::size_t>(d.D_loss.size()));
            for (std::size_t k = 0; k < oracle.size(); ++k)
                CHECK(std::abs(d.D_loss[static_cast<Eigen::Index>(k)] - oracle[k]) < 1e-6);
        }
    }
}

TEST_CASE("detuning scan finds the phase-matched value")
{
    const NormalizedParams p = fixtures::small_device(0.0, 0.95);
    for (int mu : {0, 6}) {
        const double target = phase_matched_detuning(mu, p);
        std::vector<double> grid;
        for (int i = -5; i <= 5; ++i)
            grid.push_back(target + 0.5 * i + 0.1);
        const DetuningScanResult r = detuning_scan(mu, p, grid);
        CHECK(std::abs(r.best_delta - target) <= 0.5);
        const auto w = r.winner.weights();
        if (mu == 0) {
            CHECK(w[p.grid().index(0)] > 0.99);
        } else {
            CHECK(w[p.grid().index(mu)] + w[p.grid().index(-mu)] > 0.99);
            CHECK(w[p.grid().index(mu)] > 0.3);
            CHECK(w[p.grid().index(-mu)] > 0.3);
        }
    }
}
