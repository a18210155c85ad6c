#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "spinpair/errors.hpp"

namespace spinpair::stats {

/// Probabilities of 0/1/2 atoms remaining after state-selective ejection.
struct EjectionOutcome {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;

    void validate() const {
        for (double p : {p0, p1, p2})
            if (!(p >= 0.0) || !(p <= 1.0)) throw input_error("ejection probabilities must be in [0,1]");
        if (p0 + p1 + p2 > 1.0 + 1e-12) throw input_error("ejection probabilities exceed 1");
    }
};

struct SqueezingResult {
    double mean_imbalance = 0.0;  // zero under the postselection used here
    double variance = 0.0;        // (Delta J_z)^2
    double zeta2 = 0.0;
    double db = 0.0;              // 10 log10(zeta^2), relative to shot noise N/4
    bool defined = false;         // false when P0 + P1 = 0
    bool perfect = false;         // zeta^2 = 0, dB = -inf
};

/// Relative number squeezing from ejection outcomes, restricted to the
/// postselected n in {0,1} subspace:
///   (Delta J_z)^2 = 0.25 P1/(P0+P1),  zeta^2 = P1/(N (P0+P1)).
inline SqueezingResult squeezing_from_outcomes(const EjectionOutcome& out, int n_atoms) {
    out.validate();
    if (n_atoms < 1) throw input_error("squeezing_from_outcomes: need at least one atom");
    SqueezingResult r;
    const double kept = out.p0 + out.p1;
    if (kept <= 0.0) return r;  // undefined, flagged via r.defined
    r.defined = true;
    r.variance = 0.25 * out.p1 / kept;
    r.zeta2 = out.p1 / (double(n_atoms) * kept);
    if (r.zeta2 == 0.0) {
        r.perfect = true;
        r.db = -std::numeric_limits<double>::infinity();
    } else {
        r.db = 10.0 * std::log10(r.zeta2);
    }
    return r;
}

inline double zeta2_from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Push-out detection efficiencies for atoms left in f=2 and atoms
/// transferred to f=3.
struct DetectionModel {
    double eta_f2 = 0.944;
    double eta_f3 = 0.997;

    void validate() const {
        for (double e : {eta_f2, eta_f3})
            if (!(e >= 0.0) || !(e <= 1.0)) throw input_error("detection efficiencies must be in [0,1]");
    }
};

/// Apparent outcome distribution after binomial misidentification: each truly
/// remaining f=2 atom is kept with eta_f2 (missed otherwise), each ejected
/// atom survives the push-out with 1 - eta_f3.
inline EjectionOutcome apparent_outcome(const DetectionModel& model, const EjectionOutcome& truth) {
    model.validate();
    truth.validate();
    const double pt[3] = {truth.p0, truth.p1, truth.p2};
    double ap[3] = {0.0, 0.0, 0.0};
    const auto binom = [](int n, int k) { return (n == 2 && k == 1) ? 2.0 : 1.0; };
    for (int n = 0; n <= 2; ++n) {          // n atoms truly remain
        const int e = 2 - n;                 // e atoms truly ejected
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= e; ++j) {
                const double prob = binom(n, i) * std::pow(model.eta_f2, i) *
                                    std::pow(1.0 - model.eta_f2, n - i) * binom(e, j) *
                                    std::pow(1.0 - model.eta_f3, j) *
                                    std::pow(model.eta_f3, e - j);
                ap[i + j] += pt[n] * prob;
            }
    }
    return {ap[0], ap[1], ap[2]};
}

/// Expected measured (Delta J_z)^2 produced purely by detection errors, for a
/// true outcome with P1 = 0 (perfect pair correlation).
inline double detection_variance(const DetectionModel& model, const EjectionOutcome& truth) {
    const auto res = squeezing_from_outcomes(apparent_outcome(model, truth), 2);
    if (!res.defined) throw numeric_error("detection_variance: empty postselected subspace");
    return res.variance;
}

/// Monte-Carlo estimate of the same quantity; validation oracle for the
/// closed form.
inline double detection_variance_mc(const DetectionModel& model, const EjectionOutcome& truth,
                                    std::size_t trials, std::uint64_t seed) {
    model.validate();
    truth.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t t = 0; t < trials; ++t) {
        const double pick = u(rng);
        int remain = pick < truth.p0 ? 0 : (pick < truth.p0 + truth.p1 ? 1 : 2);
        int apparent = 0;
        for (int a = 0; a < remain; ++a)
            if (u(rng) < model.eta_f2) ++apparent;
        for (int a = 0; a < 2 - remain; ++a)
            if (u(rng) >= model.eta_f3) ++apparent;
        ++counts[apparent];
    }
    const double kept = double(counts[0] + counts[1]);
    if (kept == 0.0) throw numeric_error("detection_variance_mc: no postselected events");
    return 0.25 * double(counts[1]) / kept;
}

// --- chi-squared test -------------------------------------------------------

namespace detail {

/// Regularized upper incomplete gamma Q(a, x), series + Lentz continued
/// fraction.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw input_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double ln_ga = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P
        double term = 1.0 / a, sum = term, ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - ln_ga);
    }
    // continued fraction for Q
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - ln_ga) * h;
}

}  // namespace detail

struct ChiSquaredResult {
    double chi2 = 0.0;
    int df = 0;
    double p_value = 0.0;
};

/// Pearson chi-squared of observed counts against expected probabilities
/// (renormalized internally). df defaults to classes - 1; pass df_override to
/// match a different counting.
inline ChiSquaredResult chi_squared_uniformity(const std::vector<double>& observed,
                                               const std::vector<double>& expected,
                                               int df_override = -1) {
    if (observed.size() != expected.size() || observed.empty())
        throw input_error("chi_squared_uniformity: size mismatch");
    double total = 0.0, norm = 0.0;
    for (double o : observed) {
        if (o < 0.0) throw input_error("chi_squared_uniformity: negative count");
        total += o;
    }
    if (total <= 0.0) throw input_error("chi_squared_uniformity: no observations");
    for (double e : expected) {
        if (e <= 0.0) throw input_error("chi_squared_uniformity: zero expected cell");
        norm += e;
    }
    ChiSquaredResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double mean = total * expected[i] / norm;
        const double diff = observed[i] - mean;
        r.chi2 += diff * diff / mean;
    }
    r.df = (df_override > 0) ? df_override : int(observed.size()) - 1;
    r.p_value = detail::gamma_q(0.5 * r.df, 0.5 * r.chi2);
    return r;
}

}  // namespace spinpair::stats
