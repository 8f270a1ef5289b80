#pragma once

// Deterministic elementary statistical functions the rest of the library is
// built on: standard normal CDF/survival/quantile and chi-square survival
// functions for 1 df and even df.
//
// Accuracy contract:
//   - std_normal_cdf: absolute error <= 1e-14 for |z| <= 8, relative error
//     <= 1e-10 through the deep tail while the result is a normal double.
//   - std_normal_quantile: |cdf(z) - q| <= 1e-12, root-found against our own
//     CDF so round trips are internally consistent.
//   - chi2_survival_even_df: closed form, exact up to summation rounding.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "surprisal/errors.hpp"

namespace surprisal {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// A probability in [0, 1]. Construction from anything else is rejected.
class Probability {
public:
    explicit Probability(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw domain_error("probability out of [0,1]: " + std::to_string(v));
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

// A standard-normal score (standard-deviation units).
class ZScore {
public:
    explicit ZScore(double v) : value_(v) {
        if (!std::isfinite(v))
            throw domain_error("z score must be finite");
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

enum class LogBase { bits, nats };

// Result of clamping a raw probability into (0, 1]: values that underflowed
// the representable range come back as the smallest positive double with the
// saturated flag set, never as a silent zero.
struct ClampedProbability {
    Probability p;
    bool saturated;
};

inline ClampedProbability clamp_probability(double raw) {
    if (std::isnan(raw)) throw domain_error("probability is NaN");
    if (raw > 1.0) raw = 1.0;  // tolerate 1 + epsilon rounding
    if (raw > 0.0) return {Probability(raw), false};
    return {Probability(std::numeric_limits<double>::denorm_min()), true};
}

namespace detail {

// ---------------------------------------------------------------------------
// Rational Chebyshev approximation of erf/erfc (W. J. Cody's scheme).
// Three regimes: |x| <= 0.46875 (erf), 0.46875 < x <= 4 (erfc), x > 4
// (asymptotic erfc). The exp(-x^2) factor is split as
// exp(-xsq^2)*exp(-(x-xsq)(x+xsq)) with xsq rounded to 1/16ths, which
// preserves relative accuracy deep in the tail.
// ---------------------------------------------------------------------------

inline double erf_small(double x) {
    // |x| <= 0.46875
    static constexpr double a[5] = {
        3.16112374387056560e+00, 1.13864154151050156e+02, 3.77485237685302021e+02,
        3.20937758913846947e+03, 1.85777706184603153e-01};
    static constexpr double b[4] = {
        2.36012909523441209e+01, 2.44024637934444173e+02, 1.28261652607737228e+03,
        2.84423683343917062e+03};
    double y2 = x * x;
    if (y2 < 1.11e-16 * 1.11e-16) y2 = 0.0;
    double num = a[4] * y2;
    double den = y2;
    for (int i = 0; i < 3; ++i) {
        num = (num + a[i]) * y2;
        den = (den + b[i]) * y2;
    }
    return x * (num + a[3]) / (den + b[3]);
}

inline double exp_mxx(double y) {
    // exp(-y*y) with the split-argument trick; y >= 0.
    double ysq = std::trunc(y * 16.0) / 16.0;
    double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc(y) for y >= 0.46875.
inline double erfc_tail(double y) {
    if (y <= 4.0) {
        static constexpr double c[9] = {
            5.64188496988670089e-01, 8.88314979438837594e+00, 6.61191906371416295e+01,
            2.98635138197400131e+02, 8.81952221241769090e+02, 1.71204761263407058e+03,
            2.05107837782607147e+03, 1.23033935479799725e+03, 2.15311535474403846e-08};
        static constexpr double d[8] = {
            1.57449261107098347e+01, 1.17693950891312499e+02, 5.37181101862009858e+02,
            1.62138957456669019e+03, 3.29079923573345963e+03, 4.36261909014324716e+03,
            3.43936767414372164e+03, 1.23033935480374942e+03};
        double num = c[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + c[i]) * y;
            den = (den + d[i]) * y;
        }
        return exp_mxx(y) * (num + c[7]) / (den + d[7]);
    }
    static constexpr double p[6] = {
        3.05326634961232344e-01, 3.60344899949804439e-01, 1.25781726111229246e-01,
        1.60837851487422766e-02, 6.58749161529837803e-04, 1.63153871373020978e-02};
    static constexpr double q[5] = {
        2.56852019228982242e+00, 1.87295284992346047e+00, 5.27905102951428412e-01,
        6.05183413124413191e-02, 2.33520497626869185e-03};
    double y2 = 1.0 / (y * y);
    double num = p[5] * y2;
    double den = y2;
    for (int i = 0; i < 4; ++i) {
        num = (num + p[i]) * y2;
        den = (den + q[i]) * y2;
    }
    double r = y2 * (num + p[4]) / (den + q[4]);
    // 1/sqrt(pi) = 0.5641895835477563
    r = (0.5641895835477563 - r) / y;
    return exp_mxx(y) * r;  // underflows to 0 far beyond the representable tail
}

inline double erfc_nonneg(double y) {
    return y <= 0.46875 ? 1.0 - erf_small(y) : erfc_tail(y);
}

constexpr double sqrt1_2 = 0.70710678118654752440;   // 1/sqrt(2)
constexpr double inv_sqrt_2pi = 0.39894228040143267794;

// Phi(z); complement handled by sign so Phi(z) + Phi(-z) == 1 exactly.
inline double norm_cdf(double z) {
    if (z <= 0.0) return 0.5 * erfc_nonneg(-z * sqrt1_2);
    return 1.0 - 0.5 * erfc_nonneg(z * sqrt1_2);
}

// 1 - Phi(z), computed tail-wise (no cancellation for large z).
inline double norm_survival(double z) { return norm_cdf(-z); }

inline double norm_pdf(double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z); }

// Inverse normal CDF on (0, 0.5]: rational initial guess (Acklam) polished by
// Newton steps against norm_cdf. Callers reduce by symmetry first.
inline double norm_quantile_lower(double q) {
    double z;
    if (q < 0.02425) {
        static constexpr double c[6] = {
            -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
            -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
        static constexpr double d[4] = {
            7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
            3.754408661907416e+00};
        double u = std::sqrt(-2.0 * std::log(q));
        z = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else {
        static constexpr double a[6] = {
            -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
        static constexpr double b[5] = {
            -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
            6.680131188771972e+01,  -1.328068155288572e+01};
        double u = q - 0.5;
        double r = u * u;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Newton polish; skipped where Phi underflows past useful precision.
    if (q >= 1e-300) {
        for (int i = 0; i < 3; ++i) {
            double f = norm_cdf(z) - q;
            double step = f / norm_pdf(z);
            z -= step;
            if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(z))) break;
        }
    }
    return z;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline Probability std_normal_cdf(ZScore z) {
    return Probability(detail::norm_cdf(z.value()));
}

// Upper tail 1 - Phi(z), kept accurate deep into the tail.
inline Probability std_normal_survival(ZScore z) {
    return Probability(detail::norm_survival(z.value()));
}

inline ZScore std_normal_quantile(Probability q) {
    double v = q.value();
    if (v <= 0.0 || v >= 1.0)
        throw domain_error("normal quantile requires 0 < q < 1 (quantile is infinite at the endpoints)");
    // 1 - v is exact for v >= 0.5 (Sterbenz), so the symmetric reduction is safe.
    if (v > 0.5) return ZScore(-detail::norm_quantile_lower(1.0 - v));
    return ZScore(detail::norm_quantile_lower(v));
}

// Two-sided p whose deviance is x: 2 * (1 - Phi(sqrt(x))).
inline Probability chi2_survival_1df(double x) {
    if (!(x >= 0.0))
        throw domain_error("chi-square statistic must be nonnegative");
    double p = 2.0 * detail::norm_survival(std::sqrt(x));
    return Probability(p > 1.0 ? 1.0 : p);
}

// Survival of the chi-square distribution with even df = 2K:
//   exp(-x/2) * sum_{j=0}^{K-1} (x/2)^j / j!
// Summed in increasing j (all terms positive); switches to log space when
// exp(-x/2) would underflow.
inline Probability chi2_survival_even_df(double x, int df) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw domain_error("chi-square statistic must be finite and nonnegative");
    if (df <= 0 || df % 2 != 0)
        throw domain_error("df must be an even positive integer (df = 2K)");
    const int k = df / 2;
    const double h = 0.5 * x;
    if (h <= 700.0) {
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < k; ++j) {
            term *= h / static_cast<double>(j);
            sum += term;
        }
        double p = std::exp(-h) * sum;
        return Probability(p > 1.0 ? 1.0 : p);
    }
    // log-sum-exp over c_j = j*ln(h) - ln(j!)
    const double lh = std::log(h);
    double lfact = 0.0, cmax = 0.0;
    for (int j = 1; j < k; ++j) {
        lfact += std::log(static_cast<double>(j));
        double c = j * lh - lfact;
        if (c > cmax) cmax = c;
    }
    double s = 0.0;
    lfact = 0.0;
    for (int j = 0; j < k; ++j) {
        if (j > 0) lfact += std::log(static_cast<double>(j));
        s += std::exp(j * lh - lfact - cmax);
    }
    double logp = -h + cmax + std::log(s);
    double p = std::exp(logp);  // 0 on underflow; callers clamp and flag
    return Probability(p > 1.0 ? 1.0 : p);
}

}  // namespace surprisal
