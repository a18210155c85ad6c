#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spinpair/measurement_stats.hpp"

using namespace spinpair;
using Catch::Approx;

TEST_CASE("number squeezing from ejection outcomes", "[measurement_stats]") {
    SECTION("perfect correlation") {
        const auto r = stats::squeezing_from_outcomes({0.7, 0.0, 0.3}, 2);
        CHECK(r.defined);
        CHECK(r.perfect);
        CHECK(r.zeta2 == 0.0);
        CHECK(std::isinf(r.db));
    }
    SECTION("measured variance 0.032 maps to -11.94 dB") {
        // P1/(P0+P1) = 0.128 gives (Delta Jz)^2 = 0.032
        const auto r = stats::squeezing_from_outcomes({0.872, 0.128, 0.0}, 2);
        CHECK(r.variance == Approx(0.032).epsilon(1e-12));
        CHECK(r.zeta2 == Approx(0.064).epsilon(1e-12));
        CHECK(r.db == Approx(-11.94).margin(0.005));
        CHECK(r.db == Approx(-11.9).margin(0.31));  // "11.9 dB below shot noise"
    }
    SECTION("half-half outcome") {
        const auto r = stats::squeezing_from_outcomes({0.5, 0.5, 0.0}, 2);
        CHECK(r.zeta2 == Approx(0.25).epsilon(1e-14));
        CHECK(r.mean_imbalance == 0.0);
    }
    SECTION("zeta2 equals variance normalized to shot noise") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 0.5);
        for (int i = 0; i < 50; ++i) {
            const double p0 = u(rng), p1 = u(rng);
            const auto r = stats::squeezing_from_outcomes({p0, p1, 1.0 - p0 - p1}, 2);
            CHECK(r.zeta2 == Approx(r.variance / 0.5).epsilon(1e-13));
        }
    }
    SECTION("dB round trip") {
        const auto r = stats::squeezing_from_outcomes({0.8, 0.07, 0.13}, 2);
        CHECK(stats::zeta2_from_db(r.db) == Approx(r.zeta2).epsilon(1e-12));
    }
    SECTION("empty postselected subspace is flagged") {
        const auto r = stats::squeezing_from_outcomes({0.0, 0.0, 1.0}, 2);
        CHECK(!r.defined);
    }
    CHECK_THROWS_AS(stats::squeezing_from_outcomes({-0.1, 0.5, 0.5}, 2), input_error);
    CHECK_THROWS_AS(stats::squeezing_from_outcomes({0.5, 0.5, 0.0}, 0), input_error);
}

TEST_CASE("detection-error variance model", "[measurement_stats]") {
    const stats::DetectionModel model{0.944, 0.997};
    const stats::EjectionOutcome truth{0.39, 0.0, 0.61};

    SECTION("perfect detection gives zero variance") {
        CHECK(stats::detection_variance({1.0, 1.0}, truth) == 0.0);
    }
    SECTION("default model lands near the quoted detection-limited variance") {
        const double v = stats::detection_variance(model, truth);
        CHECK(v == Approx(0.0366).margin(5e-4));
        CHECK(v == Approx(0.034).margin(0.004));
    }
    SECTION("Monte-Carlo oracle agrees with the closed form") {
        const double v = stats::detection_variance(model, truth);
        const double mc = stats::detection_variance_mc(model, truth, 1000000, 314159);
        CHECK(mc == Approx(v).margin(6e-4));
    }
    SECTION("monotone nonincreasing in each efficiency") {
        double prev = 1.0;
        for (double eta = 0.90; eta <= 1.0001; eta += 0.01) {
            const double v = stats::detection_variance({eta, 0.997}, truth);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        prev = 1.0;
        for (double eta = 0.95; eta <= 1.0001; eta += 0.005) {
            const double v = stats::detection_variance({0.944, eta}, truth);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
    SECTION("apparent outcome is a probability distribution") {
        const auto ap = stats::apparent_outcome(model, truth);
        CHECK(ap.p0 + ap.p1 + ap.p2 == Approx(1.0).epsilon(1e-12));
        CHECK(ap.p0 >= 0.0);
        CHECK(ap.p1 >= 0.0);
        CHECK(ap.p2 >= 0.0);
    }
}

TEST_CASE("chi-squared uniformity test", "[measurement_stats]") {
    SECTION("exact proportionality gives zero") {
        const auto r = stats::chi_squared_uniformity({100, 100, 100}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        CHECK(r.chi2 == Approx(0.0).margin(1e-12));
        CHECK(r.p_value == Approx(1.0).epsilon(1e-12));
        CHECK(r.df == 2);
    }
    SECTION("equal thirds against the 1/5, 2/5, 2/5 hypothesis is strongly rejected") {
        const auto r = stats::chi_squared_uniformity({167, 167, 166}, {0.2, 0.4, 0.4});
        CHECK(r.chi2 > 30.0);
        CHECK(r.p_value < 0.001);
    }
    SECTION("expected probabilities are renormalized") {
        const auto a = stats::chi_squared_uniformity({30, 50, 20}, {0.2, 0.4, 0.4});
        const auto b = stats::chi_squared_uniformity({30, 50, 20}, {1.0, 2.0, 2.0});
        CHECK(a.chi2 == Approx(b.chi2).epsilon(1e-14));
    }
    SECTION("df override reproduces the published test values") {
        // chi2 = 1.9 at df = 3 -> p ~ 0.59; chi2 = 71.1 at df = 3 -> p < 0.001
        CHECK(stats::detail::gamma_q(1.5, 0.95) == Approx(0.593).margin(0.003));
        CHECK(stats::detail::gamma_q(1.5, 0.5 * 71.1) < 1e-3);
        const auto r = stats::chi_squared_uniformity({1, 1, 1, 1}, {0.25, 0.25, 0.25, 0.25}, 3);
        CHECK(r.df == 3);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(stats::chi_squared_uniformity({1, 2}, {0.5, 0.0}), input_error);
        CHECK_THROWS_AS(stats::chi_squared_uniformity({0, 0}, {0.5, 0.5}), input_error);
        CHECK_THROWS_AS(stats::chi_squared_uniformity({1, 2, 3}, {0.5, 0.5}), input_error);
    }
    SECTION("gamma_q against erfc identity: Q(1/2, x) = erfc(sqrt(x))") {
        for (double x : {0.1, 0.5, 1.0, 2.5, 7.0})
            CHECK(stats::detail::gamma_q(0.5, x) == Approx(std::erfc(std::sqrt(x))).epsilon(1e-10));
    }
}
