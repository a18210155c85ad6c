#pragma once

#include <array>
#include <cmath>
#include <cstdlib>

#include "spinpair/errors.hpp"

namespace spinpair::angular {

/// n! as a double; exact for n <= 18, correctly rounded up to 170.
inline double factorial(int n) {
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * double(i);
        return t;
    }();
    if (n < 0) throw input_error("factorial: negative argument");
    if (n >= int(table.size())) throw input_error("factorial: argument too large, use ln_factorial");
    return table[std::size_t(n)];
}

/// log(n!) with a small cached table; lgamma beyond it.
inline double ln_factorial(int n) {
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(double(i));
        return t;
    }();
    if (n < 0) throw input_error("ln_factorial: negative argument");
    if (n < int(table.size())) return table[std::size_t(n)];
    return std::lgamma(double(n) + 1.0);
}

/// Clebsch-Gordan coefficient <f1 m1; f2 m2 | F M> for integer spins, in the
/// Condon-Shortley convention (real). Evaluated with the Racah sum; exact
/// integer factorials up to the double-exact range, log-gamma beyond, so it
/// stays an independent closed-form oracle at any spin.
inline double clebsch_gordan(int f1, int m1, int f2, int m2, int F, int M) {
    if (f1 < 0 || f2 < 0 || F < 0) throw input_error("clebsch_gordan: negative spin");
    if (std::abs(m1) > f1 || std::abs(m2) > f2 || std::abs(M) > F)
        throw input_error("clebsch_gordan: |m| exceeds spin");
    if (F < std::abs(f1 - f2) || F > f1 + f2)
        throw input_error("clebsch_gordan: triangle condition violated");
    if (m1 + m2 != M) return 0.0;

    const bool exact = f1 + f2 + F + 1 <= 18;  // every factorial argument fits 2^53
    const auto sum_terms = [&](auto&& term_of) {
        double sum = 0.0;
        for (int k = 0;; ++k) {
            const int t1 = f1 + f2 - F - k;
            const int t2 = f1 - m1 - k;
            const int t3 = f2 + m2 - k;
            const int t4 = F - f2 + m1 + k;
            const int t5 = F - f1 - m2 + k;
            if (t1 < 0 || t2 < 0 || t3 < 0) break;
            if (t4 < 0 || t5 < 0) continue;
            const double term = term_of(k, t1, t2, t3, t4, t5);
            sum += (k % 2 == 0) ? term : -term;
        }
        return sum;
    };

    if (exact) {
        const double pre = std::sqrt(
            (2.0 * F + 1.0) * factorial(F + f1 - f2) * factorial(F - f1 + f2) *
            factorial(f1 + f2 - F) / factorial(f1 + f2 + F + 1) * factorial(F + M) *
            factorial(F - M) * factorial(f1 + m1) * factorial(f1 - m1) * factorial(f2 + m2) *
            factorial(f2 - m2));
        return pre * sum_terms([&](int k, int t1, int t2, int t3, int t4, int t5) {
                   return 1.0 / (factorial(k) * factorial(t1) * factorial(t2) * factorial(t3) *
                                 factorial(t4) * factorial(t5));
               });
    }
    const double ln_pre =
        0.5 * (std::log(2.0 * F + 1.0) + ln_factorial(F + f1 - f2) + ln_factorial(F - f1 + f2) +
               ln_factorial(f1 + f2 - F) - ln_factorial(f1 + f2 + F + 1) + ln_factorial(F + M) +
               ln_factorial(F - M) + ln_factorial(f1 + m1) + ln_factorial(f1 - m1) +
               ln_factorial(f2 + m2) + ln_factorial(f2 - m2));
    return sum_terms([&](int k, int t1, int t2, int t3, int t4, int t5) {
        return std::exp(ln_pre - ln_factorial(k) - ln_factorial(t1) - ln_factorial(t2) -
                        ln_factorial(t3) - ln_factorial(t4) - ln_factorial(t5));
    });
}

}  // namespace spinpair::angular
