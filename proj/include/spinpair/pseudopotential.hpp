#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spinpair/errors.hpp"
#include "spinpair/motional_basis.hpp"
#include "spinpair/spin_channels.hpp"
#include "spinpair/units.hpp"

namespace spinpair::pseudo {

/// Normalized Gaussian interaction profile exp[-r^2/(2w^2)] / (2 pi w^2)^{3/2}.
struct GaussianPotential {
    double width_au = 0.0;  // Bohr radii

    void validate() const {
        if (!(width_au > 0.0)) throw input_error("Gaussian width must be positive");
    }
};

/// Width matching the delta-potential total cross section at low energy:
/// w^2 = sum a_F^4 / sum a_F^2. Bohr radii in, Bohr radii out.
inline double gaussian_width(const spin::ScatteringLengths& a) {
    a.validate();
    const double s2 = a.a0 * a.a0 + a.a2 * a.a2 + a.a4 * a.a4;
    const double s4 = std::pow(a.a0, 4) + std::pow(a.a2, 4) + std::pow(a.a4, 4);
    return std::sqrt(s4 / s2);
}

/// Literal terminating Gauss series F(-m,-n;c;z) = sum_k (-m)_k (-n)_k /
/// ((c)_k k!) z^k, summed over exactly min(m,n)+1 terms with Neumaier
/// compensation. Ill-conditioned for large n,m at z near or above 1/2; kept
/// as the textbook route, the production overlap uses the transformed series
/// below.
inline double hyp2f1_terminating(int m, int n, double c, double z) {
    if (m < 0 || n < 0) throw input_error("hyp2f1_terminating: expects -m, -n with m,n >= 0");
    const int k_max = std::min(m, n);
    long double term = 1.0L;
    long double sum = 1.0L;
    long double comp = 0.0L;
    for (int k = 0; k < k_max; ++k) {
        term *= (long double)(k - m) * (long double)(k - n) * (long double)z /
                ((long double)(c + k) * (long double)(k + 1));
        const long double t = sum + term;
        if (std::fabs((double)sum) >= std::fabs((double)term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return double(sum + comp);
}

/// 1D Gaussian-weighted oscillator overlap
///   I_{n,m} = int phi_n(x) exp[-x^2/(2w^2)] phi_m(x) dx,
/// a terminating Gauss hypergeometric series in disguise. Evaluated through
/// the quadratic transformation, whose floor(min(n,m)/2)+1 terms all share
/// one sign, with log-gamma factorials and compensated summation; this stays
/// accurate where the raw F(-m,-n;c;z) sum cancels catastrophically.
/// Depends on sigma and w only through lambda = sigma^2/(2 w^2).
inline double overlap_integral_lambda(int n, int m, double lambda) {
    if (n < 0 || m < 0) throw input_error("overlap_integral: negative index");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw input_error("overlap_integral: lambda must be positive and finite");
    if ((n + m) % 2 != 0) return 0.0;
    if (m > n) std::swap(n, m);

    // p^2 = 2 alpha^2 = 1 + lambda; A = (1-p^2)/p^2 = -lambda/(1+lambda);
    // B = 2/p^2. Sign (-1)^d with d = (n-m)/2 factored out.
    const int d = (n - m) / 2;
    const double ln_a = std::log(lambda) - std::log1p(lambda);
    const double ln_b = std::log(2.0) - std::log1p(lambda);
    const double ln_pre = 0.5 * (angular::ln_factorial(n) + angular::ln_factorial(m)) -
                          0.5 * (n + m) * std::log(2.0) - 0.5 * std::log1p(lambda);

    const int j_max = m / 2;
    double t_peak = -std::numeric_limits<double>::infinity();
    std::vector<double> ln_t(std::size_t(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) {
        ln_t[std::size_t(j)] = (2 * j + d) * ln_a + (m - 2 * j) * ln_b -
                               angular::ln_factorial(j) - angular::ln_factorial(j + d) -
                               angular::ln_factorial(m - 2 * j);
        t_peak = std::max(t_peak, ln_t[std::size_t(j)]);
    }
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (int j = 0; j <= j_max; ++j) {
        const long double term = std::exp((long double)(ln_t[std::size_t(j)] - t_peak));
        const long double t = sum + term;
        comp += (sum - t) + term;
        sum = t;
    }
    const double value =
        ((d % 2 == 0) ? 1.0 : -1.0) * std::exp(ln_pre + t_peak + std::log(double(sum + comp)));
    if (!std::isfinite(value))
        throw numeric_error("overlap_integral: non-finite value at n=" + std::to_string(n) +
                            " m=" + std::to_string(m));
    return value;
}

inline double overlap_integral(int n, int m, double sigma, double w) {
    if (!(sigma > 0.0) || !(w > 0.0)) throw input_error("overlap_integral: sigma, w must be positive");
    return overlap_integral_lambda(n, m, sigma * sigma / (2.0 * w * w));
}

/// Mode-overlap matrix of the Gaussian pseudopotential over a basis, in
/// dimensionless oscillator units (hbar = mu = wbar = 1):
///   T_{n,m} = I_{nx,mx} I_{ny,my} I_{nz,mz} / (2 pi w^2)^{3/2}.
/// Assembled from three per-axis I tables rather than 3D quadrature.
struct CouplingMatrix {
    Eigen::MatrixXd t;          // N x N, symmetric
    double sigma[3] = {0, 0, 0};  // per-axis oscillator lengths, internal units
    double alpha[3] = {0, 0, 0};  // 2 alpha_i^2 = 1 + sigma_i^2/(2 w^2)
    double width = 0.0;           // internal units
};

inline Eigen::MatrixXd axis_overlap_table(int n_max, double lambda) {
    Eigen::MatrixXd table(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        for (int m = 0; m <= n; ++m) {
            const double v = overlap_integral_lambda(n, m, lambda);
            table(n, m) = v;
            table(m, n) = v;
        }
    return table;
}

inline CouplingMatrix coupling_matrix(const basis::BasisSet& bs, const OscillatorUnits& units,
                                      const GaussianPotential& pot) {
    pot.validate();
    if (bs.size() == 0) throw input_error("coupling_matrix: empty basis");
    CouplingMatrix cm;
    cm.width = units.length_from_bohr(pot.width_au);
    cm.sigma[0] = units.sigma_x();
    cm.sigma[1] = units.sigma_y();
    cm.sigma[2] = units.sigma_z();

    Eigen::MatrixXd tab[3];
    for (int ax = 0; ax < 3; ++ax) {
        const double lambda = cm.sigma[ax] * cm.sigma[ax] / (2.0 * cm.width * cm.width);
        cm.alpha[ax] = std::sqrt(0.5 * (1.0 + lambda));
        tab[ax] = axis_overlap_table(bs.max_index(ax), lambda);
    }

    const auto n = Eigen::Index(bs.size());
    const double norm = std::pow(2.0 * M_PI * cm.width * cm.width, -1.5);
    cm.t.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = bs.modes[std::size_t(i)];
        for (Eigen::Index j = 0; j <= i; ++j) {
            const auto& b = bs.modes[std::size_t(j)];
            const double v =
                tab[0](a.nx, b.nx) * tab[1](a.ny, b.ny) * tab[2](a.nz, b.nz) * norm;
            cm.t(i, j) = v;
            cm.t(j, i) = v;
        }
    }
    if (!cm.t.allFinite()) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j)
                if (!std::isfinite(cm.t(i, j)))
                    throw numeric_error("coupling_matrix: non-finite entry at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
    }
    return cm;
}

/// phi_n(0) per mode, internal units. phi_n(0) vanishes unless every index is
/// even; for even n the 1D value is sigma^{-1/2} pi^{-1/4} H_n(0)/sqrt(2^n n!)
/// with H_n(0) = (-1)^{n/2} n!/(n/2)!.
struct DeltaCouplingVector {
    Eigen::VectorXd phi0;
};

inline double phi_at_origin(int n, double sigma) {
    if (n < 0) throw input_error("phi_at_origin: negative index");
    if (n % 2 != 0) return 0.0;
    const int h = n / 2;
    const double ln_mag = -0.5 * std::log(sigma) - 0.25 * std::log(M_PI) +
                          0.5 * angular::ln_factorial(n) - 0.5 * n * std::log(2.0) -
                          angular::ln_factorial(h);
    return ((h % 2 == 0) ? 1.0 : -1.0) * std::exp(ln_mag);
}

inline DeltaCouplingVector delta_coupling_vector(const basis::BasisSet& bs,
                                                 const OscillatorUnits& units) {
    if (bs.size() == 0) throw input_error("delta_coupling_vector: empty basis");
    const double sig[3] = {units.sigma_x(), units.sigma_y(), units.sigma_z()};
    DeltaCouplingVector v;
    v.phi0.resize(Eigen::Index(bs.size()));
    for (std::size_t i = 0; i < bs.size(); ++i) {
        const auto& n = bs.modes[i];
        v.phi0(Eigen::Index(i)) =
            phi_at_origin(n.nx, sig[0]) * phi_at_origin(n.ny, sig[1]) * phi_at_origin(n.nz, sig[2]);
    }
    return v;
}

/// Dense delta-potential analogue of the Gaussian T: the rank-one matrix
/// phi_n(0) phi_m(0).
inline Eigen::MatrixXd coupling_matrix_delta(const basis::BasisSet& bs,
                                             const OscillatorUnits& units) {
    const auto v = delta_coupling_vector(bs, units).phi0;
    return v * v.transpose();
}

enum class CrossSectionModel { gaussian, delta };

/// Born-approximation total cross section summed over the F = 0,2,4 channels.
/// k in inverse Bohr radii, result in Bohr radii squared; both models give
/// 8 pi sum a_F^2 at k = 0.
inline double total_cross_section(double k, const spin::ScatteringLengths& a,
                                  CrossSectionModel model, double width_au = 0.0) {
    a.validate();
    if (k < 0.0) throw input_error("total_cross_section: k must be nonnegative");
    const double af[3] = {a.a0, a.a2, a.a4};
    double sum = 0.0;
    for (double aF : af) {
        if (model == CrossSectionModel::delta) {
            sum += 8.0 * M_PI * aF * aF / (1.0 + k * k * aF * aF);
        } else {
            if (!(width_au > 0.0)) throw input_error("total_cross_section: gaussian model needs width");
            const double x = 2.0 * width_au * width_au * k * k;
            const double suppression = (x == 0.0) ? 1.0 : -std::expm1(-x) / x;
            sum += 8.0 * M_PI * aF * aF * suppression;
        }
    }
    return sum;
}

}  // namespace spinpair::pseudo
