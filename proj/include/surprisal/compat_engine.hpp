#pragma once

// Per-hypothesis compatibility measures (p, s, MLR, deviance, relative
// likelihood), multi-level compatibility and likelihood intervals, curve
// sampling, and the conversion battery between p values and the derived
// information measures under the 1-df normal approximation.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "surprisal/errors.hpp"
#include "surprisal/special_functions.hpp"
#include "surprisal/study_model.hpp"

namespace surprisal {

// ---------------------------------------------------------------------------
// Hypotheses
// ---------------------------------------------------------------------------

struct Hypothesis {
    enum class Kind { point, at_most, at_least, interval };

    Kind kind = Kind::point;
    double value = 0.0;     // point / bound / interval lower
    double value_hi = 0.0;  // interval upper

    static Hypothesis point(double v) { return {Kind::point, v, v}; }
    static Hypothesis at_most(double v) { return {Kind::at_most, v, v}; }
    static Hypothesis at_least(double v) { return {Kind::at_least, v, v}; }
    static Hypothesis interval(double a, double b) {
        if (!(a < b)) throw input_error("interval hypothesis requires a < b");
        return {Kind::interval, a, b};
    }

    std::string label() const {
        char buf[64];
        switch (kind) {
            case Kind::point:
                std::snprintf(buf, sizeof buf, "=%g", value);
                break;
            case Kind::at_most:
                std::snprintf(buf, sizeof buf, "<=%g", value);
                break;
            case Kind::at_least:
                std::snprintf(buf, sizeof buf, ">=%g", value);
                break;
            case Kind::interval:
                std::snprintf(buf, sizeof buf, "[%g,%g]", value, value_hi);
                break;
        }
        return buf;
    }
};

enum class Direction { at_most, at_least };

// All measures at one test hypothesis. Invariants: s_bits = -log2(p),
// s_nats = s_bits * ln 2, deviance = 2 ln(MLR), rel_likelihood = 1/MLR,
// and deviance = z^2 for point hypotheses.
struct CompatPoint {
    Hypothesis hypothesis;
    double z = 0.0;
    double p = 1.0;
    double s_bits = 0.0;
    double s_nats = 0.0;
    double mlr = 1.0;
    double deviance = 0.0;
    double rel_likelihood = 1.0;
    bool saturated = false;         // p (or rel_likelihood) clamped at the representable floor
    bool mlr_extrapolated = false;  // composite-hypothesis MLR uses the boundary convention, an extension of the point-hypothesis definition
};

// ---------------------------------------------------------------------------
// Conversions p -> s / MLR / deviance
// ---------------------------------------------------------------------------

inline double s_value(Probability p, LogBase base) {
    if (p.value() == 0.0)
        throw saturation_error("s-value saturated: p underflowed the smallest representable positive probability",
                               std::numeric_limits<double>::denorm_min());
    double s = base == LogBase::bits ? -std::log2(p.value()) : -std::log(p.value());
    return s + 0.0;  // normalize -0.0 at p = 1
}

namespace detail {

// z such that the two-sided p at z equals p: z = -quantile(p/2).
inline double z_from_two_sided_p(Probability p) {
    if (p.value() == 0.0)
        throw saturation_error("conversion saturated: p underflowed",
                               std::numeric_limits<double>::denorm_min());
    double half = 0.5 * p.value();
    if (half == 0.0)
        throw saturation_error("conversion saturated: p/2 underflowed",
                               std::numeric_limits<double>::denorm_min());
    return -std_normal_quantile(Probability(half)).value();
}

struct MlrParts {
    double mlr;
    double rel_likelihood;
    bool saturated;
};

// exp(dev/2) with overflow/underflow saturation instead of inf/0.
inline MlrParts mlr_from_deviance(double deviance) {
    MlrParts m{1.0, 1.0, false};
    double half = 0.5 * deviance;
    m.mlr = std::exp(half);
    if (std::isinf(m.mlr)) {
        m.mlr = std::numeric_limits<double>::max();
        m.saturated = true;
    }
    m.rel_likelihood = std::exp(-half);
    if (m.rel_likelihood == 0.0) {
        m.rel_likelihood = std::numeric_limits<double>::denorm_min();
        m.saturated = true;
    }
    return m;
}

// Fills the derived fields of a CompatPoint from a raw p and a deviance.
inline CompatPoint make_point(Hypothesis hyp, double z, double p_raw, double deviance) {
    CompatPoint cp;
    cp.hypothesis = hyp;
    cp.z = z;
    auto clamped = clamp_probability(p_raw);
    cp.p = clamped.p.value();
    cp.saturated = clamped.saturated;
    cp.s_bits = s_value(clamped.p, LogBase::bits);
    cp.s_nats = s_value(clamped.p, LogBase::nats);
    cp.deviance = deviance;
    auto m = mlr_from_deviance(deviance);
    cp.mlr = m.mlr;
    cp.rel_likelihood = m.rel_likelihood;
    cp.saturated = cp.saturated || m.saturated;
    return cp;
}

}  // namespace detail

inline double mlr_from_p(Probability p) {
    double z = detail::z_from_two_sided_p(p);
    return detail::mlr_from_deviance(z * z).mlr;
}

inline double deviance_from_p(Probability p) {
    double z = detail::z_from_two_sided_p(p);
    return z * z;
}

// ---------------------------------------------------------------------------
// Per-hypothesis measures
// ---------------------------------------------------------------------------

// Two-sided p for H: theta = r under the recovered normal model.
inline CompatPoint p_point(const NormalApprox& model, double r) {
    const double t = transform(model.scale, r);
    const double z = (model.mean - t) / model.sd;
    const double p_raw = 2.0 * detail::norm_survival(std::fabs(z));
    return detail::make_point(Hypothesis::point(r), z, p_raw > 1.0 ? 1.0 : p_raw, z * z);
}

// One-sided p for a directional hypothesis; the supremum over the composite
// is attained at the boundary r. The MLR is exp(z^2/2) only when the estimate
// lies outside H (flagged as an extrapolation of the point-hypothesis MLR).
inline CompatPoint p_directional(const NormalApprox& model, double r, Direction dir) {
    const double t = transform(model.scale, r);
    const double z = (model.mean - t) / model.sd;
    const double p_raw = dir == Direction::at_most ? detail::norm_survival(z)
                                                   : detail::norm_cdf(z);
    const bool estimate_inside = dir == Direction::at_most ? z <= 0.0 : z >= 0.0;
    const double deviance = estimate_inside ? 0.0 : z * z;
    Hypothesis hyp = dir == Direction::at_most ? Hypothesis::at_most(r) : Hypothesis::at_least(r);
    CompatPoint cp = detail::make_point(hyp, z, p_raw, deviance);
    cp.mlr_extrapolated = true;
    return cp;
}

// p for H: a <= theta <= b: 1 when the estimate is inside, otherwise the
// two-sided p at the nearer boundary.
inline CompatPoint p_interval_hypothesis(const NormalApprox& model, double a, double b) {
    if (!(a < b)) throw input_error("interval hypothesis requires a < b");
    const double ta = transform(model.scale, a);
    const double tb = transform(model.scale, b);
    Hypothesis hyp = Hypothesis::interval(a, b);
    if (model.mean >= ta && model.mean <= tb) {
        CompatPoint cp = detail::make_point(hyp, 0.0, 1.0, 0.0);
        cp.mlr_extrapolated = true;
        return cp;
    }
    const double boundary = model.mean < ta ? a : b;
    CompatPoint cp = p_point(model, boundary);
    cp.hypothesis = hyp;
    cp.mlr_extrapolated = true;
    return cp;
}

inline CompatPoint evaluate(const NormalApprox& model, const Hypothesis& hyp) {
    switch (hyp.kind) {
        case Hypothesis::Kind::point:
            return p_point(model, hyp.value);
        case Hypothesis::Kind::at_most:
            return p_directional(model, hyp.value, Direction::at_most);
        case Hypothesis::Kind::at_least:
            return p_directional(model, hyp.value, Direction::at_least);
        case Hypothesis::Kind::interval:
            return p_interval_hypothesis(model, hyp.value, hyp.value_hi);
    }
    throw input_error("unknown hypothesis kind");
}

// ---------------------------------------------------------------------------
// Interval estimates
// ---------------------------------------------------------------------------

struct IntervalEstimate {
    enum class Kind { compatibility, likelihood };
    Kind kind = Kind::compatibility;
    double level = 0.0;  // percentile level; for likelihood intervals the implied one
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> mlr_cutoff;  // set for likelihood intervals
};

// Closed form inv_t(m -+ q((1+level)/2) d): exactly the set of r whose
// two-sided p exceeds 1 - level.
inline IntervalEstimate compatibility_interval(const NormalApprox& model, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw domain_error("interval level must lie strictly inside (0,1)");
    const double q = std_normal_quantile(Probability(0.5 * (1.0 + level))).value();
    IntervalEstimate est;
    est.kind = IntervalEstimate::Kind::compatibility;
    est.level = level;
    est.lower = inverse_transform(model.scale, model.mean - q * model.sd);
    est.upper = inverse_transform(model.scale, model.mean + q * model.sd);
    return est;
}

// {r : MLR(r) <= cutoff} = inv_t(m -+ sqrt(2 ln cutoff) d).
inline IntervalEstimate likelihood_interval(const NormalApprox& model, double cutoff) {
    if (!(cutoff > 1.0))
        throw domain_error("likelihood-interval cutoff must exceed 1");
    const double half = std::sqrt(2.0 * std::log(cutoff));
    IntervalEstimate est;
    est.kind = IntervalEstimate::Kind::likelihood;
    est.level = 1.0 - chi2_survival_1df(2.0 * std::log(cutoff)).value();
    est.lower = inverse_transform(model.scale, model.mean - half * model.sd);
    est.upper = inverse_transform(model.scale, model.mean + half * model.sd);
    est.mlr_cutoff = cutoff;
    return est;
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

// Node spacing is uniform on the transformed scale.
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 401;
};

// m -+ 4d on the transformed scale, 401 nodes: covers p down to ~6e-5.
inline GridSpec default_grid(const NormalApprox& model) {
    GridSpec g;
    g.lo = inverse_transform(model.scale, model.mean - 4.0 * model.sd);
    g.hi = inverse_transform(model.scale, model.mean + 4.0 * model.sd);
    g.count = 401;
    return g;
}

struct CurvePoint {
    double value = 0.0;  // natural scale
    CompatPoint measures;
};

struct CurveSample {
    Scale scale = Scale::ratio;
    GridSpec grid;
    std::vector<CurvePoint> points;
};

inline CurveSample curve(const NormalApprox& model, const GridSpec& grid) {
    if (grid.count < 2) throw input_error("grid count must be at least 2");
    if (!(grid.lo < grid.hi)) throw input_error("grid requires lo < hi");
    const double tlo = transform(model.scale, grid.lo);
    const double thi = transform(model.scale, grid.hi);
    CurveSample cs;
    cs.scale = model.scale;
    cs.grid = grid;
    cs.points.reserve(static_cast<std::size_t>(grid.count));
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.count; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(grid.count - 1);
        const double t = tlo + (thi - tlo) * frac;
        const double r = inverse_transform(model.scale, t);
        if (!(r > prev))
            throw input_error("grid too fine: node " + std::to_string(i) + " does not increase");
        prev = r;
        cs.points.push_back({r, p_point(model, r)});
    }
    return cs;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

inline std::vector<CompatPoint> hypothesis_table(const NormalApprox& model,
                                                 const std::vector<Hypothesis>& hypotheses) {
    if (hypotheses.empty()) throw input_error("hypothesis list is empty");
    std::vector<CompatPoint> rows;
    rows.reserve(hypotheses.size());
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        try {
            rows.push_back(evaluate(model, hypotheses[i]));
        } catch (const domain_error& e) {
            throw domain_error("hypothesis " + std::to_string(i + 1) + ": " + e.what());
        } catch (const input_error& e) {
            throw input_error("hypothesis " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return rows;
}

struct ConversionRow {
    double p = 1.0;
    double s_bits = 0.0;
    double mlr = 1.0;
    double deviance = 0.0;
};

inline std::vector<ConversionRow> s_table(const std::vector<Probability>& p_values) {
    std::vector<ConversionRow> rows;
    rows.reserve(p_values.size());
    for (const auto& p : p_values) {
        ConversionRow row;
        row.p = p.value();
        row.s_bits = s_value(p, LogBase::bits);
        double z = detail::z_from_two_sided_p(p);
        row.deviance = z * z;
        row.mlr = detail::mlr_from_deviance(row.deviance).mlr;
        rows.push_back(row);
    }
    return rows;
}

// The thirteen reference p values used for the conversion table: common alpha
// levels plus the 5-sigma, GWAS and 6-sigma thresholds as exact upper-tail
// probabilities.
inline std::vector<Probability> canonical_p_values() {
    std::vector<Probability> ps;
    for (double v : {0.99, 0.90, 0.50, 0.25, 0.10, 0.05, 0.025, 0.01, 0.005, 0.0001})
        ps.emplace_back(v);
    ps.push_back(std_normal_survival(ZScore(5.0)));
    ps.emplace_back(1e-8);
    ps.push_back(std_normal_survival(ZScore(6.0)));
    return ps;
}

// Two decimal places up to 10 bits; z-score approximations are not reliable
// past ~2 digits below p = 0.001, so larger s-values round to an integer.
inline std::string display_round(double s_bits) {
    if (!(s_bits >= 0.0) || !std::isfinite(s_bits))
        throw domain_error("s-value must be finite and nonnegative");
    char buf[32];
    if (s_bits <= 10.0)
        std::snprintf(buf, sizeof buf, "%.2f", s_bits);
    else
        std::snprintf(buf, sizeof buf, "%.0f", s_bits);
    return buf;
}

}  // namespace surprisal
