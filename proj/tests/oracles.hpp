// Independent numerical oracles used by the tests. These deliberately avoid
// the library's evaluation paths: quadrature instead of the hypergeometric
// closed form, an adaptive Runge-Kutta integrator instead of spectral
// propagation, and direct summation instead of closed-form partition
// functions.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// --- adaptive Simpson quadrature ---------------------------------------------

inline double simpson_slice(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_slice(a, m, fa, flm, fm);
    const double right = simpson_slice(m, b, fm, frm, fb);
    if (depth <= 0) return left + right;
    // `force` levels are always subdivided so narrow structure cannot slip
    // between the coarse probe points
    if (force <= 0 && std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 48, int force = 10) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson_slice(a, b, fa, fm, fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth, force);
}

// --- oscillator eigenfunctions ------------------------------------------------

/// Dimensionless normalized eigenfunction psi_n(u) = pi^{-1/4}
/// H_n(u) e^{-u^2/2} / sqrt(2^n n!), via the stable normalized recurrence.
inline double psi_dimensionless(int n, double u) {
    double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * u * u);
    if (n == 0) return p0;
    double p1 = std::sqrt(2.0) * u * p0;
    for (int k = 2; k <= n; ++k) {
        const double p2 = u * std::sqrt(2.0 / k) * p1 - std::sqrt((k - 1.0) / k) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// Quadrature value of the 1D overlap integral I_{n,m} for lambda =
/// sigma^2/(2 w^2); integrand written in the scaled coordinate u = x/sigma.
inline double overlap_by_quadrature(int n, int m, double lambda, double tol = 1e-13) {
    if ((n + m) % 2 != 0) return 0.0;
    const double psi_span = std::sqrt(2.0 * std::max(n, m) + 1.0) + 10.0;
    const double gauss_span = std::sqrt(708.0 / lambda);  // exp underflow edge
    const double span = std::min(psi_span, gauss_span);
    const auto f = [&](double u) {
        return psi_dimensionless(n, u) * psi_dimensionless(m, u) * std::exp(-lambda * u * u);
    };
    // even integrand
    return 2.0 * adaptive_simpson(f, 0.0, span, tol);
}

// --- adaptive RK45 for i dc/dt = H c -----------------------------------------

/// Cash-Karp embedded Runge-Kutta with step control, for the linear
/// Schrodinger system dc/dt = -i H c (hbar = 1).
inline Eigen::VectorXcd integrate_schrodinger(const Eigen::MatrixXd& h, Eigen::VectorXcd c,
                                              double t_end, double tol = 1e-10) {
    using Vec = Eigen::VectorXcd;
    const std::complex<double> mi(0.0, -1.0);
    const auto rhs = [&](const Vec& y) { return (mi * (h * y)).eval(); };

    double t = 0.0;
    double dt = t_end > 0 ? std::min(1e-2, t_end) : 0.0;
    int steps = 0;
    while (t < t_end) {
        if (++steps > 2000000) throw std::runtime_error("integrate_schrodinger: too many steps");
        dt = std::min(dt, t_end - t);
        const Vec k1 = rhs(c);
        const Vec k2 = rhs(c + dt * 0.2 * k1);
        const Vec k3 = rhs(c + dt * (0.075 * k1 + 0.225 * k2));
        const Vec k4 = rhs(c + dt * (0.3 * k1 - 0.9 * k2 + 1.2 * k3));
        const Vec k5 = rhs(c + dt * (-11.0 / 54.0 * k1 + 2.5 * k2 - 70.0 / 27.0 * k3 +
                                     35.0 / 27.0 * k4));
        const Vec k6 =
            rhs(c + dt * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 + 575.0 / 13824.0 * k3 +
                          44275.0 / 110592.0 * k4 + 253.0 / 4096.0 * k5));
        const Vec c5 = c + dt * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4 +
                                 512.0 / 1771.0 * k6);
        const Vec c4 = c + dt * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                                 13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 + 0.25 * k6);
        const double err = (c5 - c4).norm() / std::max(1.0, c5.norm());
        if (err <= tol || dt <= 1e-14 * t_end) {
            t += dt;
            c = c5;
            dt *= std::min(5.0, 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2));
        } else {
            dt *= std::max(0.1, 0.9 * std::pow(tol / err, 0.25));
        }
    }
    return c;
}

// --- brute-force thermal sums --------------------------------------------------

/// Direct summation of the 1D even/odd-ladder partition functions, truncated
/// when the tail is negligible.
inline double partition_sum_1d(double beta_hw, bool odd) {
    double sum = 0.0;
    for (int m = 0;; ++m) {
        const double n = odd ? (2.0 * m + 1.0) : (2.0 * m);
        const double term = std::exp(-beta_hw * (n + 0.5));
        sum += term;
        if (term < sum * 1e-18 && m > 4) break;
        if (m > 100000000) break;
    }
    return sum;
}

}  // namespace oracle
