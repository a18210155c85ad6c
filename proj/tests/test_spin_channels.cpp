#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spinpair/angular.hpp"
#include "spinpair/spin_channels.hpp"

using namespace spinpair;
using Catch::Approx;

TEST_CASE("Clebsch-Gordan reference values", "[spin_channels]") {
    CHECK(angular::clebsch_gordan(2, 0, 2, 0, 0, 0) == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(angular::clebsch_gordan(2, 1, 2, -1, 4, 1) == 0.0);  // m1 + m2 != M
    CHECK(angular::clebsch_gordan(2, 2, 2, -2, 0, 0) == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));

    // <j m j -m | 0 0> = (-1)^{j-m} / sqrt(2j+1)
    for (int j = 0; j <= 4; ++j)
        for (int m = -j; m <= j; ++m) {
            const double expected = ((j - m) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(2.0 * j + 1.0);
            CHECK(angular::clebsch_gordan(j, m, j, -m, 0, 0) == Approx(expected).epsilon(1e-13));
        }
}

TEST_CASE("Clebsch-Gordan rejects invalid quantum numbers", "[spin_channels]") {
    CHECK_THROWS_AS(angular::clebsch_gordan(2, 3, 2, 0, 2, 0), input_error);
    CHECK_THROWS_AS(angular::clebsch_gordan(2, 0, 2, 0, 5, 0), input_error);
    CHECK_THROWS_AS(angular::clebsch_gordan(1, 0, 3, 0, 1, 0), input_error);
    CHECK_THROWS_AS(angular::clebsch_gordan(2, 0, 2, 0, 2, 3), input_error);
    CHECK_THROWS_AS(angular::clebsch_gordan(-1, 0, 2, 0, 2, 0), input_error);
}

TEST_CASE("Clebsch-Gordan completeness over two spin-2 atoms", "[spin_channels]") {
    for (int m1 = -2; m1 <= 2; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2) {
            double sum = 0.0;
            for (int F = 0; F <= 4; ++F)
                for (int M = -F; M <= F; ++M) {
                    const double c = angular::clebsch_gordan(2, m1, 2, m2, F, M);
                    sum += c * c;
                }
            CHECK(sum == Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("Clebsch-Gordan completeness beyond the exact-factorial range", "[spin_channels]") {
    // f1 = f2 = 6 exercises the log-gamma route (factorial arguments up to 25)
    for (int m1 : {-6, -3, 0, 2, 6})
        for (int m2 : {-5, 0, 1, 6}) {
            double sum = 0.0;
            for (int F = 0; F <= 12; ++F)
                for (int M = -F; M <= F; ++M) {
                    const double c = angular::clebsch_gordan(6, m1, 6, m2, F, M);
                    sum += c * c;
                }
            CHECK(sum == Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("general coupling coefficient", "[spin_channels]") {
    // channel projections of g_{0,0}^{0,0}: (7 g0 + 10 g2 + 18 g4)/35
    CHECK(spin::coupling_coefficient_general(0, 0, 0, 0, 1, 0, 0) == Approx(7.0 / 35.0));
    CHECK(spin::coupling_coefficient_general(0, 0, 0, 0, 0, 1, 0) == Approx(10.0 / 35.0));
    CHECK(spin::coupling_coefficient_general(0, 0, 0, 0, 0, 0, 1) == Approx(18.0 / 35.0));
    // magnetization not conserved
    CHECK(spin::coupling_coefficient_general(0, 0, 1, 1, 1.0, 2.0, 3.0) == 0.0);
    // g_{1,-1}^{2,-2} at the 85Rb lengths equals 1550/35
    CHECK(spin::coupling_coefficient_general(1, -1, 2, -2, -740, -570, -390) ==
          Approx(1550.0 / 35.0).epsilon(1e-12));
    CHECK_THROWS_AS(spin::coupling_coefficient_general(3, 0, 0, 0, 1, 1, 1), input_error);
}

TEST_CASE("coupling table matches the brute-force Clebsch-Gordan sum", "[spin_channels]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    for (int trial = 0; trial < 50; ++trial) {
        spin::ScatteringLengths a;
        a.a0 = u(rng);
        a.a2 = u(rng);
        a.a4 = u(rng);
        const auto t = spin::coupling_table(a);
        const auto g = [&](int m1, int m2, int m3, int m4) {
            return spin::coupling_coefficient_general(m1, m2, m3, m4, a.a0, a.a2, a.a4);
        };
        // relative 1e-12 with an absolute floor for near-cancelling tables
        CHECK(t.g00_00 == Approx(g(0, 0, 0, 0)).epsilon(1e-12).margin(1e-9));
        CHECK(t.g00_1m1 == Approx(g(0, 0, 1, -1)).epsilon(1e-12).margin(1e-9));
        CHECK(t.g00_2m2 == Approx(g(0, 0, 2, -2)).epsilon(1e-12).margin(1e-9));
        CHECK(t.g1m1_1m1 == Approx(g(1, -1, 1, -1)).epsilon(1e-12).margin(1e-9));
        CHECK(t.g1m1_2m2 == Approx(g(1, -1, 2, -2)).epsilon(1e-12).margin(1e-9));
        CHECK(t.g2m2_2m2 == Approx(g(2, -2, 2, -2)).epsilon(1e-12).margin(1e-9));
    }
}

TEST_CASE("coupling table closed-form values", "[spin_channels]") {
    spin::ScatteringLengths a;  // 85Rb defaults
    const auto t = spin::coupling_table(a);
    CHECK(t.g00_1m1 == Approx(3350.0 / 35.0).epsilon(1e-14));
    CHECK(t.g00_2m2 == Approx(-650.0 / 35.0).epsilon(1e-14));

    spin::ScatteringLengths su5{1.0, 1.0, 1.0, 0, 0, 0};
    CHECK(spin::coupling_table(su5).g00_1m1 == Approx(0.0).margin(1e-16));

    spin::ScatteringLengths bad{0.0, 0.0, 0.0, 0, 0, 0};
    CHECK_THROWS_AS(spin::coupling_table(bad), input_error);
}

TEST_CASE("coupling coefficients permutation symmetries", "[spin_channels]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double g0 = u(rng), g2 = u(rng), g4 = u(rng);
    for (int m1 = -2; m1 <= 2; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2)
            for (int m3 = -2; m3 <= 2; ++m3)
                for (int m4 = -2; m4 <= 2; ++m4) {
                    const double base = spin::coupling_coefficient_general(m1, m2, m3, m4, g0, g2, g4);
                    const double swapped_pairs =
                        spin::coupling_coefficient_general(m3, m4, m1, m2, g0, g2, g4);
                    const double swapped_in =
                        spin::coupling_coefficient_general(m2, m1, m3, m4, g0, g2, g4);
                    CHECK(base == swapped_pairs);  // identical products, identical rounding
                    CHECK(base == Approx(swapped_in).margin(1e-13));
                }
}

TEST_CASE("spin block matrix", "[spin_channels]") {
    spin::ScatteringLengths a;
    const auto t = spin::coupling_table(a);
    const auto m = spin::spin_block_matrix(t);
    CHECK(m(0, 1) == Approx(std::sqrt(2.0) * 3350.0 / 35.0).epsilon(1e-14));
    CHECK(m(0, 1) == Approx(135.36).epsilon(1e-3));
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);

    spin::CouplingTable zero;
    CHECK(spin::spin_block_matrix(zero).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symmetrized matrix-element ratio at the central lengths", "[spin_channels]") {
    spin::ScatteringLengths a;
    const auto t = spin::coupling_table(a);
    const double num = std::pow(std::sqrt(2.0) * t.g00_1m1, 2);
    const double den = std::pow(2.0 * t.g1m1_2m2, 2);
    CHECK(num / den == Approx(2.34).margin(0.01));
}
