#pragma once

// Test-only reference implementations, independent of the library's rational
// approximations: a positive-term series / Lentz continued-fraction error
// function in long double, a Gauss-Legendre quadrature for chi-square tails,
// and a bisection quantile built on the oracle CDF.

#include <cmath>
#include <vector>

namespace oracle {

inline constexpr long double pi_l = 3.14159265358979323846264338327950288L;

// erf(x) for 0 <= x < 3 via the scaled Maclaurin series
//   erf(x) = 2x e^{-x^2}/sqrt(pi) * sum_n (2x^2)^n / (1*3*...*(2n+1)),
// which has only positive terms (no cancellation).
inline long double erf_series(long double x) {
    const long double x2 = x * x;
    long double term = 1.0L, sum = 1.0L;
    for (int n = 1; n < 400; ++n) {
        term *= 2.0L * x2 / static_cast<long double>(2 * n + 1);
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return 2.0L * x * std::exp(-x2) / std::sqrt(pi_l) * sum;
}

// erfc(x) for x >= 3 via the Legendre continued fraction
//   erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz algorithm.
inline long double erfc_cf(long double x) {
    const long double tiny = 1e-4000L;
    long double f = x, c = x, d = 0.0L;
    for (int n = 1; n < 400; ++n) {
        const long double a = static_cast<long double>(n) / 2.0L;
        d = x + a * d;
        if (d == 0.0L) d = tiny;
        c = x + a / c;
        if (c == 0.0L) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-21L) break;
    }
    return std::exp(-x * x) / std::sqrt(pi_l) / f;
}

inline long double erfc_oracle(long double x) {
    if (x < 0.0L) return 2.0L - erfc_oracle(-x);
    if (x < 3.0L) return 1.0L - erf_series(x);
    return erfc_cf(x);
}

inline long double norm_cdf(long double z) {
    const long double x = -z / std::sqrt(2.0L);
    return 0.5L * erfc_oracle(x);
}

inline long double norm_survival(long double z) { return norm_cdf(-z); }

// Bisection quantile on the oracle CDF.
inline double norm_quantile_bisect(double q) {
    long double lo = -42.0L, hi = 42.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (norm_cdf(mid) < static_cast<long double>(q)) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-16L) break;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1], found by Newton iteration on the
// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<long double>& nodes,
                           std::vector<long double>& weights) {
    nodes.assign(n, 0.0L);
    weights.assign(n, 0.0L);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(pi_l * (i + 0.75L) / (n + 0.5L));
        long double pp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const long double p2 = ((2.0L * j - 1.0L) * x * p1 - (j - 1.0L) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-20L) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0L / ((1.0L - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

}  // namespace detail

// Survival function of the chi-square distribution with df = 2K, integrated
// numerically: S(x) = int_x^inf t^{K-1} e^{-t/2} / (2^K (K-1)!) dt.
inline double chi2_survival_quadrature(double x, int k) {
    static std::vector<long double> nodes, weights;
    if (nodes.empty()) detail::gauss_legendre(20, nodes, weights);

    long double log_norm = -k * std::log(2.0L);  // minus log Gamma(K) added below
    for (int j = 2; j < k; ++j) log_norm -= std::log(static_cast<long double>(j));

    auto log_density = [&](long double t) {
        return (k - 1) * std::log(t) - 0.5L * t + log_norm;
    };

    const long double upper = static_cast<long double>(x) + 500.0L + 20.0L * k;
    const long double panel = 2.0L;
    long double total = 0.0L;
    for (long double a = x; a < upper; a += panel) {
        const long double b = std::min(a + panel, upper);
        const long double half = 0.5L * (b - a), mid = 0.5L * (a + b);
        long double acc = 0.0L;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const long double t = mid + half * nodes[i];
            if (t <= 0.0L) continue;
            acc += weights[i] * std::exp(log_density(t));
        }
        total += half * acc;
    }
    return static_cast<double>(total);
}

}  // namespace oracle
