#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "spinpair/errors.hpp"
#include "spinpair/spin_channels.hpp"
#include "spinpair/trajectory.hpp"

namespace spinpair::rate {

/// Incoherent transition rates between the three spin modes, 1/s. gamma02 is
/// zero in the default model and only switched on for sensitivity studies.
struct RateParams {
    double gamma01 = 0.0;
    double gamma12 = 0.0;
    double gamma02 = 0.0;

    void validate() const {
        if (gamma01 < 0.0 || gamma12 < 0.0 || gamma02 < 0.0)
            throw input_error("rates must be nonnegative");
    }
};

/// Central value plus 16/50/84 percentiles under sampling of the
/// scattering-length uncertainties. Percentiles rather than a standard
/// deviation: the ratio distribution is heavy-tailed because the denominator
/// coupling can cross zero within the sampled range.
struct RatioStat {
    double central = 0.0;
    double p16 = 0.0;
    double p50 = 0.0;
    double p84 = 0.0;

    double half_width() const { return 0.5 * (p84 - p16); }
};

struct RateRatios {
    RatioStat r01_12;  // gamma01 / gamma12
    RatioStat r02_01;  // gamma02 / gamma01
    RatioStat r02_12;  // gamma02 / gamma12
    bool degenerate = false;  // some denominator vanished
};

/// Rate ratios from the squared symmetrized matrix elements:
/// (sqrt2 g00_1m1)^2 : (2 g1m1_2m2)^2 : (sqrt2 g00_2m2)^2. With a lengths
/// argument, the scattering-length uncertainties are propagated by Gaussian
/// sampling.
inline RateRatios rate_ratios(const spin::CouplingTable& t,
                              const spin::ScatteringLengths* lengths = nullptr,
                              unsigned samples = 20000, std::uint64_t seed = 1) {
    const auto sq = [](double x) { return x * x; };
    RateRatios r;
    const double c01 = sq(std::sqrt(2.0) * t.g00_1m1);
    const double c12 = sq(2.0 * t.g1m1_2m2);
    const double c02 = sq(std::sqrt(2.0) * t.g00_2m2);
    if (c12 == 0.0 || c01 == 0.0) {
        r.degenerate = true;
        return r;
    }
    r.r01_12.central = c01 / c12;
    r.r02_01.central = c02 / c01;
    r.r02_12.central = c02 / c12;

    if (lengths != nullptr) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> d01_12, d02_01, d02_12;
        d01_12.reserve(samples);
        d02_01.reserve(samples);
        d02_12.reserve(samples);
        for (unsigned i = 0; i < samples; ++i) {
            spin::ScatteringLengths s = *lengths;
            s.a0 += lengths->a0_err * gauss(rng);
            s.a2 += lengths->a2_err * gauss(rng);
            s.a4 += lengths->a4_err * gauss(rng);
            const auto tt = spin::coupling_table(s);
            const double s01 = sq(std::sqrt(2.0) * tt.g00_1m1);
            const double s12 = sq(2.0 * tt.g1m1_2m2);
            const double s02 = sq(std::sqrt(2.0) * tt.g00_2m2);
            if (s12 == 0.0 || s01 == 0.0) continue;
            d01_12.push_back(s01 / s12);
            d02_01.push_back(s02 / s01);
            d02_12.push_back(s02 / s12);
        }
        const auto fill = [](RatioStat& stat, std::vector<double>& v) {
            if (v.empty()) return;
            std::sort(v.begin(), v.end());
            stat.p16 = v[std::size_t(0.16 * double(v.size()))];
            stat.p50 = v[std::size_t(0.50 * double(v.size()))];
            stat.p84 = v[std::size_t(0.84 * double(v.size()))];
        };
        fill(r.r01_12, d01_12);
        fill(r.r02_01, d02_01);
        fill(r.r02_12, d02_12);
    }
    return r;
}

/// Generator of the rate equations; columns sum to zero so total probability
/// is conserved. Symmetric by construction, so the solve is spectral and
/// exact.
inline Eigen::Matrix3d rate_generator(const RateParams& p) {
    Eigen::Matrix3d g;
    g << -(p.gamma01 + p.gamma02), p.gamma01, p.gamma02,  //
        p.gamma01, -(p.gamma01 + p.gamma12), p.gamma12,   //
        p.gamma02, p.gamma12, -(p.gamma12 + p.gamma02);
    return g;
}

inline PopulationTrajectory solve_rate_equations(const RateParams& params,
                                                 const std::array<double, 3>& initial,
                                                 const std::vector<double>& times_s) {
    params.validate();
    for (double v : initial)
        if (!std::isfinite(v)) throw input_error("solve_rate_equations: non-finite initial value");
    for (std::size_t i = 0; i + 1 < times_s.size(); ++i)
        if (times_s[i + 1] < times_s[i]) throw input_error("solve_rate_equations: times must be sorted");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(rate_generator(params));
    if (solver.info() != Eigen::Success) throw numeric_error("solve_rate_equations: eigensolve failed");
    const Eigen::Vector3d p0(initial[0], initial[1], initial[2]);
    const Eigen::Vector3d a = solver.eigenvectors().transpose() * p0;

    PopulationTrajectory traj;
    traj.time_s = times_s;
    traj.p.resize(times_s.size());
    for (std::size_t i = 0; i < times_s.size(); ++i) {
        Eigen::Vector3d z;
        for (int k = 0; k < 3; ++k) z(k) = a(k) * std::exp(solver.eigenvalues()(k) * times_s[i]);
        const Eigen::Vector3d p = solver.eigenvectors() * z;
        traj.p[i] = {p(0), p(1), p(2)};
    }
    return traj;
}

struct RateFit {
    double gamma12 = 0.0;
    double gamma01 = 0.0;
    double residual = 0.0;  // sum of squares at the optimum
    bool degenerate = false;  // objective flat in gamma12
    PopulationTrajectory model;
};

namespace detail {

inline double fit_objective(const PopulationTrajectory& data, double ratio, double gamma12,
                            bool weighted) {
    RateParams p;
    p.gamma12 = gamma12;
    p.gamma01 = ratio * gamma12;
    const auto model = solve_rate_equations(
        p, data.p.front(),
        [&] {
            std::vector<double> rel(data.time_s.size());
            for (std::size_t i = 0; i < rel.size(); ++i) rel[i] = data.time_s[i] - data.time_s.front();
            return rel;
        }());
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        for (int b = 0; b < 3; ++b) {
            const double r = model.p[i][std::size_t(b)] - data.p[i][std::size_t(b)];
            double w = 1.0;
            if (weighted && data.has_errors()) {
                const double se = data.se[i][std::size_t(b)];
                if (se > 0.0) w = 1.0 / (se * se);
            }
            sse += w * r * r;
        }
    return sse;
}

}  // namespace detail

/// Single-parameter least-squares fit of gamma12 with gamma01 = ratio *
/// gamma12 enforced, jointly over the three population series. Coarse
/// logarithmic scan followed by golden-section refinement.
inline RateFit fit_rate(const PopulationTrajectory& data, double ratio, bool weighted = true) {
    if (data.size() < 2) throw input_error("fit_rate: need at least two time points");
    if (!(ratio > 0.0)) throw input_error("fit_rate: ratio must be positive");
    const double span = data.time_s.back() - data.time_s.front();
    if (!(span > 0.0)) throw input_error("fit_rate: zero time span");

    const auto f = [&](double g) { return detail::fit_objective(data, ratio, g, weighted); };

    const double f0 = f(0.0);
    const int scan_points = 121;
    const double g_lo = 1e-3 / span, g_hi = 1e4 / span;
    double best_g = 0.0, best_f = f0;
    std::vector<double> grid(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        grid[std::size_t(i)] =
            g_lo * std::pow(g_hi / g_lo, double(i) / double(scan_points - 1));
        const double fi = f(grid[std::size_t(i)]);
        if (fi < best_f) {
            best_f = fi;
            best_g = grid[std::size_t(i)];
        }
    }

    RateFit fit;
    if (best_g > 0.0) {
        // golden-section refinement between scan neighbours
        const auto it = std::lower_bound(grid.begin(), grid.end(), best_g);
        const std::size_t idx = std::size_t(it - grid.begin());
        double lo = (idx == 0) ? best_g / 10.0 : grid[idx - 1];
        double hi = (idx + 1 >= grid.size()) ? best_g * 10.0 : grid[idx + 1];
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * hi; ++iter) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = f(x2);
            }
        }
        best_g = 0.5 * (lo + hi);
        best_f = f(best_g);
        if (f0 <= best_f) {
            best_g = 0.0;
            best_f = f0;
        }
    }

    fit.gamma12 = best_g;
    fit.gamma01 = ratio * best_g;
    fit.residual = best_f;
    // flat objective means the data cannot constrain the rate
    const double probe = (best_g > 0.0) ? best_g * 10.0 : 1.0 / span;
    fit.degenerate = std::abs(f(probe) - best_f) <= 1e-14 * (1.0 + best_f);

    RateParams p;
    p.gamma12 = fit.gamma12;
    p.gamma01 = fit.gamma01;
    std::vector<double> rel(data.time_s.size());
    for (std::size_t i = 0; i < rel.size(); ++i) rel[i] = data.time_s[i] - data.time_s.front();
    fit.model = solve_rate_equations(p, data.p.front(), rel);
    fit.model.time_s = data.time_s;
    return fit;
}

}  // namespace spinpair::rate
