#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spinpair/rate_model.hpp"

using namespace spinpair;
using Catch::Approx;

namespace {
std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[std::size_t(i)] = a + (b - a) * double(i) / double(n - 1);
    return t;
}
}  // namespace

TEST_CASE("rate ratios at the central lengths", "[rate_model]") {
    spin::ScatteringLengths a;
    const auto t = spin::coupling_table(a);
    const auto r = rate::rate_ratios(t, &a, 20000, 99);
    CHECK(r.r01_12.central == Approx(2.34).margin(0.01));
    CHECK(r.r02_01.central == Approx(0.04).margin(0.01));
    CHECK(r.r02_12.central == Approx(0.09).margin(0.01));
    // sampled 68% halfwidth in the neighbourhood of the quoted +-1.66
    CHECK(r.r01_12.half_width() > 1.0);
    CHECK(r.r01_12.half_width() < 2.2);
    CHECK(r.r01_12.p50 == Approx(r.r01_12.central).margin(0.25));
}

TEST_CASE("rate ratio edge cases", "[rate_model]") {
    spin::CouplingTable t;
    t.g00_1m1 = 2.0;
    t.g1m1_2m2 = 2.0 / std::sqrt(2.0);  // sqrt2 g01 == 2 g12
    t.g00_2m2 = 0.5;
    const auto r = rate::rate_ratios(t);
    CHECK(!r.degenerate);
    CHECK(r.r01_12.central == Approx(1.0).epsilon(1e-12));

    spin::CouplingTable zero;
    zero.g00_1m1 = 1.0;  // but g1m1_2m2 = 0
    CHECK(rate::rate_ratios(zero).degenerate);
}

TEST_CASE("rate generator conserves probability", "[rate_model]") {
    rate::RateParams p{1.7, 0.6, 0.0};
    const auto g = rate::rate_generator(p);
    // zero up to one rounding of the summed diagonal
    for (int c = 0; c < 3; ++c) CHECK(std::abs(g.col(c).sum()) < 1e-15 * g.cwiseAbs().maxCoeff());
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rate equation solutions", "[rate_model]") {
    SECTION("uniform state is stationary") {
        const auto traj = rate::solve_rate_equations({2.34, 1.0, 0.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                                                     linspace(0, 5, 21));
        for (const auto& p : traj.p)
            for (int b = 0; b < 3; ++b) CHECK(p[std::size_t(b)] == Approx(1.0 / 3).margin(1e-12));
    }
    SECTION("relaxation to the uniform state") {
        const rate::RateParams p{2.34 * 0.8, 0.8, 0.0};
        const double t_end = 50.0 / std::min(p.gamma01, p.gamma12);
        const auto traj = rate::solve_rate_equations(p, {1.0, 0.0, 0.0}, {0.0, t_end});
        for (int b = 0; b < 3; ++b)
            CHECK(traj.p.back()[std::size_t(b)] == Approx(1.0 / 3).margin(1e-6));
    }
    SECTION("gamma12 = 0 reduces to two-state relaxation at rate 2 gamma01") {
        const rate::RateParams p{1.3, 0.0, 0.0};
        const auto times = linspace(0, 3, 31);
        const auto traj = rate::solve_rate_equations(p, {1.0, 0.0, 0.0}, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double decay = std::exp(-2.0 * p.gamma01 * times[i]);
            CHECK(traj.p[i][0] == Approx(0.5 * (1.0 + decay)).margin(1e-12));
            CHECK(traj.p[i][1] == Approx(0.5 * (1.0 - decay)).margin(1e-12));
            CHECK(traj.p[i][2] == Approx(0.0).margin(1e-14));
        }
    }
    SECTION("conservation and range for random initial points") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            double a = u(rng), b = u(rng), c = u(rng);
            const double s = a + b + c;
            a /= s;
            b /= s;
            c /= s;
            const auto traj = rate::solve_rate_equations({2.0 * u(rng) + 0.1, u(rng) + 0.1, 0.0},
                                                         {a, b, c}, linspace(0, 8, 17));
            for (const auto& p : traj.p) {
                CHECK(p[0] + p[1] + p[2] == Approx(1.0).margin(1e-12));
                for (int k = 0; k < 3; ++k) {
                    CHECK(p[std::size_t(k)] >= -1e-12);
                    CHECK(p[std::size_t(k)] <= 1.0 + 1e-12);
                }
            }
        }
    }
    CHECK_THROWS_AS(rate::solve_rate_equations({-1.0, 0.0, 0.0}, {1, 0, 0}, {0.0}), input_error);
}

TEST_CASE("rate fit", "[rate_model]") {
    SECTION("noise-free round trip") {
        const rate::RateParams truth{2.34 * 2.0, 2.0, 0.0};
        auto data = rate::solve_rate_equations(truth, {1.0, 0.0, 0.0}, linspace(0, 1.5, 25));
        const auto fit = rate::fit_rate(data, 2.34);
        CHECK(fit.gamma12 == Approx(2.0).epsilon(1e-6));
        CHECK(fit.residual < 1e-18);
        CHECK(!fit.degenerate);
    }
    SECTION("constant (1,0,0) data fits zero rate") {
        PopulationTrajectory data;
        data.time_s = linspace(0, 1, 8);
        data.p.assign(8, {1.0, 0.0, 0.0});
        const auto fit = rate::fit_rate(data, 2.34);
        CHECK(fit.gamma12 == 0.0);
    }
    SECTION("stationary data is flagged degenerate") {
        PopulationTrajectory data;
        data.time_s = linspace(0, 1, 8);
        data.p.assign(8, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        const auto fit = rate::fit_rate(data, 2.34);
        CHECK(fit.degenerate);
    }
    SECTION("golden section agrees with a dense scan") {
        const rate::RateParams truth{2.34 * 0.7, 0.7, 0.0};
        auto data = rate::solve_rate_equations(truth, {1.0, 0.0, 0.0}, linspace(0, 4, 30));
        const auto fit = rate::fit_rate(data, 2.34);
        double best_g = 0.0, best_f = 1e300;
        for (int i = 0; i <= 20000; ++i) {
            const double g = 0.5 + (0.9 - 0.5) * double(i) / 20000.0;
            const double f = rate::detail::fit_objective(data, 2.34, g, true);
            if (f < best_f) {
                best_f = f;
                best_g = g;
            }
        }
        CHECK(fit.gamma12 == Approx(best_g).epsilon(1e-4));
        CHECK(fit.gamma12 == Approx(0.7).epsilon(1e-8));
    }
    SECTION("recovers the rate from noisy data across seeds") {
        const rate::RateParams truth{2.34 * 1.5, 1.5, 0.0};
        const auto clean = rate::solve_rate_equations(truth, {1.0, 0.0, 0.0}, linspace(0, 2, 20));
        int within = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> noise(0.0, 0.01);
            PopulationTrajectory data = clean;
            for (auto& p : data.p)
                for (int b = 0; b < 3; ++b) p[std::size_t(b)] += noise(rng);
            const auto fit = rate::fit_rate(data, 2.34);
            if (std::abs(fit.gamma12 - 1.5) / 1.5 < 0.10) ++within;
        }
        CHECK(within == 100);
    }
    SECTION("input validation") {
        PopulationTrajectory tiny;
        tiny.time_s = {0.0};
        tiny.p = {{1, 0, 0}};
        CHECK_THROWS_AS(rate::fit_rate(tiny, 2.34), input_error);
        PopulationTrajectory ok;
        ok.time_s = {0.0, 1.0};
        ok.p = {{1, 0, 0}, {0.8, 0.15, 0.05}};
        CHECK_THROWS_AS(rate::fit_rate(ok, -1.0), input_error);
    }
}
