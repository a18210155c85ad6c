#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "spinpair/angular.hpp"
#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"

namespace spinpair::spin {

/// s-wave scattering lengths of the F = 0, 2, 4 collision channels, Bohr
/// radii. 85Rb values are negative.
struct ScatteringLengths {
    double a0 = constants::rb85_a0;
    double a2 = constants::rb85_a2;
    double a4 = constants::rb85_a4;
    // 1-sigma uncertainties, used only for rate-ratio error propagation
    double a0_err = constants::rb85_a0_err;
    double a2_err = constants::rb85_a2_err;
    double a4_err = constants::rb85_a4_err;

    void validate() const {
        if (!std::isfinite(a0) || !std::isfinite(a2) || !std::isfinite(a4))
            throw input_error("scattering lengths must be finite");
        if (a0 == 0.0 && a2 == 0.0 && a4 == 0.0)
            throw input_error("scattering lengths must not all vanish");
    }
};

/// The six coupling constants that survive the m1 + m2 = 0 restriction.
/// Units follow the g_F fed into coupling_table (g_per_length = 1 keeps them
/// numerically equal to the Bohr-radius expressions).
struct CouplingTable {
    double g00_00 = 0.0;
    double g00_1m1 = 0.0;
    double g00_2m2 = 0.0;
    double g1m1_1m1 = 0.0;
    double g1m1_2m2 = 0.0;
    double g2m2_2m2 = 0.0;
};

using SpinBlockMatrix = Eigen::Matrix3d;

/// General coupling coefficient g_{m1,m2}^{m3,m4} = sum_{F,M} g_F
/// <m3,m4|F,M><F,M|m1,m2> summed over the even channels F = 0, 2, 4.
/// Brute-force Clebsch-Gordan route; the closed forms in coupling_table must
/// agree with this.
inline double coupling_coefficient_general(int m1, int m2, int m3, int m4, double g0, double g2,
                                           double g4) {
    for (int m : {m1, m2, m3, m4})
        if (std::abs(m) > 2) throw input_error("coupling_coefficient_general: |m| > 2");
    const double gF[3] = {g0, g2, g4};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        const int F = 2 * i;
        for (int M = -F; M <= F; ++M) {
            // product of the two CG factors first, so swapping the in and out
            // pairs reproduces the identical floating-point value
            const double pair = angular::clebsch_gordan(2, m3, 2, m4, F, M) *
                                angular::clebsch_gordan(2, m1, 2, m2, F, M);
            sum += gF[i] * pair;
        }
    }
    return sum;
}

/// Closed forms of the six coefficients. g_F = g_per_length * a_F; the
/// default scale keeps g_F numerically equal to a_F in Bohr radii.
inline CouplingTable coupling_table(const ScatteringLengths& a, double g_per_length = 1.0) {
    a.validate();
    const double g0 = g_per_length * a.a0;
    const double g2 = g_per_length * a.a2;
    const double g4 = g_per_length * a.a4;
    CouplingTable t;
    t.g00_00 = (7.0 * g0 + 10.0 * g2 + 18.0 * g4) / 35.0;
    t.g00_1m1 = (-7.0 * g0 - 5.0 * g2 + 12.0 * g4) / 35.0;
    t.g00_2m2 = (7.0 * g0 - 10.0 * g2 + 3.0 * g4) / 35.0;
    t.g1m1_1m1 = (14.0 * g0 + 5.0 * g2 + 16.0 * g4) / 70.0;
    t.g1m1_2m2 = (-7.0 * g0 + 5.0 * g2 + 2.0 * g4) / 35.0;
    t.g2m2_2m2 = (14.0 * g0 + 20.0 * g2 + g4) / 70.0;
    return t;
}

/// Symmetrized 3x3 interaction matrix over (|0,0>, S|1,-1>, S|2,-2>). The
/// sqrt(2) and 2 factors come from expanding the symmetrized projectors.
inline SpinBlockMatrix spin_block_matrix(const CouplingTable& t) {
    const double r2 = std::sqrt(2.0);
    SpinBlockMatrix m;
    m << t.g00_00, r2 * t.g00_1m1, r2 * t.g00_2m2,   //
        r2 * t.g00_1m1, 2.0 * t.g1m1_1m1, 2.0 * t.g1m1_2m2,  //
        r2 * t.g00_2m2, 2.0 * t.g1m1_2m2, 2.0 * t.g2m2_2m2;
    return m;
}

}  // namespace spinpair::spin
