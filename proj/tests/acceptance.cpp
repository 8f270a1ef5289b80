// Acceptance suite: runs each numbered criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Invoke with a criterion number to
// run just that one; with no arguments it runs all nine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "surprisal/surprisal.hpp"
#include "oracles.hpp"
#include "svg_probe.hpp"

using namespace surprisal;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

StudySummary brown_summary() {
    StudySummary s;
    s.label = "brown_hdps";
    s.point = 1.61;
    s.lower = 0.997;
    s.upper = 2.59;
    s.level = 0.95;
    s.scale = Scale::ratio;
    return s;
}

NormalApprox brown_model() { return recover_normal_approx(brown_summary()); }

bool cell_ok(double computed, double printed, double half_unit) {
    return std::fabs(computed - printed) <= half_unit;
}

// --------------------------------------------------------------------------
// 1. Reference conversion table: 13 p values, every published cell within
//    half a unit in the last printed digit. Runtime < 1 s.
// --------------------------------------------------------------------------
Outcome criterion1() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();

    struct Row { double p, s, s_tol, mlr, mlr_tol, dev, dev_tol; };
    const double p5 = std_normal_survival(ZScore(5.0)).value();
    const double p6 = std_normal_survival(ZScore(6.0)).value();
    const std::vector<Row> rows = {
        {0.99, 0.014, 0.0005, 1.00, 0.005, 0.00016, 0.000005},
        {0.90, 0.15, 0.005, 1.01, 0.005, 0.016, 0.0005},
        {0.50, 1.00, 0.005, 1.26, 0.005, 0.45, 0.005},
        {0.25, 2.00, 0.005, 1.94, 0.005, 1.32, 0.005},
        {0.10, 3.32, 0.005, 3.87, 0.005, 2.71, 0.005},
        {0.05, 4.32, 0.005, 6.83, 0.005, 3.84, 0.005},
        {0.025, 5.32, 0.005, 12.3, 0.05, 5.02, 0.005},
        {0.01, 6.64, 0.005, 27.6, 0.05, 6.63, 0.005},
        {0.005, 7.64, 0.005, 51.4, 0.05, 7.88, 0.005},
        {0.0001, 13.3, 0.05, 1935.0, 0.5, 15.1, 0.05},
        {p5, 21.7, 0.05, 5.2e5, 0.05e5, 26.3, 0.05},
        {1e-8, 26.6, 0.05, 1.4e7, 0.05e7, 32.8, 0.05},
        {p6, 29.9, 0.05, 1.3e8, 0.05e8, 37.4, 0.05},
    };

    int bad = 0;
    for (const auto& row : rows) {
        const Probability p(row.p);
        const double s = s_value(p, LogBase::bits);
        const double mlr = mlr_from_p(p);
        const double dev = deviance_from_p(p);
        if (!cell_ok(s, row.s, row.s_tol)) {
            ++bad;
            out.fail("s(" + fmt(row.p) + ")=" + fmt(s) + " vs printed " + fmt(row.s));
        }
        if (!cell_ok(mlr, row.mlr, row.mlr_tol)) {
            ++bad;
            out.fail("mlr(" + fmt(row.p) + ")=" + fmt(mlr) + " vs printed " + fmt(row.mlr) +
                     " (tol " + fmt(row.mlr_tol) + ")");
        }
        if (!cell_ok(dev, row.dev, row.dev_tol)) {
            ++bad;
            out.fail("deviance(" + fmt(row.p) + ")=" + fmt(dev) + " vs printed " + fmt(row.dev));
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 1.0) out.fail("runtime " + fmt(elapsed) + "s >= 1s");
    out.note(std::to_string(39 - bad) + "/39 cells within half-unit, " + fmt(elapsed) + "s");
    return out;
}

// --------------------------------------------------------------------------
// 2. Six-hypothesis hazard-ratio table: all 24 published cells at printed
//    precision, plus the higher-precision p values 0.0505 (HR=1) and
//    0.373 (HR=2).
// --------------------------------------------------------------------------
Outcome criterion2() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = brown_model();

    std::vector<Hypothesis> hyps;
    for (double r : {0.5, 1.0, 1.61, 2.0, 3.0, 5.0}) hyps.push_back(Hypothesis::point(r));
    const auto rows = hypothesis_table(model, hyps);

    struct Cell { double p, ptol, s, stol, mlr, mtol, dev, dtol; };
    const Cell want[6] = {
        {1.6e-6, 0.05e-6, 19.3, 0.05, 1.0e5, 0.05e5, 23.1, 0.05},
        {0.05, 0.005, 4.31, 0.005, 6.77, 0.005, 3.82, 0.005},
        {1.0, 1e-12, 0.00, 0.005, 1.00, 0.005, 0.00, 0.005},
        {0.37, 0.005, 1.42, 0.005, 1.49, 0.005, 0.79, 0.005},
        {0.01, 0.005, 6.56, 0.005, 26.2, 0.05, 6.53, 0.005},
        {3.3e-6, 0.05e-6, 18.2, 0.05, 5.0e4, 0.05e4, 21.7, 0.05},
    };
    static const char* names[6] = {"HR=0.5", "HR=1", "HR=1.61", "HR=2", "HR=3", "HR=5"};

    int bad = 0;
    for (int i = 0; i < 6; ++i) {
        const auto& cp = rows[static_cast<std::size_t>(i)];
        if (!cell_ok(cp.p, want[i].p, want[i].ptol)) { ++bad; out.fail(std::string(names[i]) + " p=" + fmt(cp.p)); }
        if (!cell_ok(cp.s_bits, want[i].s, want[i].stol)) { ++bad; out.fail(std::string(names[i]) + " s=" + fmt(cp.s_bits)); }
        if (!cell_ok(cp.mlr, want[i].mlr, want[i].mtol)) { ++bad; out.fail(std::string(names[i]) + " mlr=" + fmt(cp.mlr)); }
        if (!cell_ok(cp.deviance, want[i].dev, want[i].dtol)) { ++bad; out.fail(std::string(names[i]) + " dev=" + fmt(cp.deviance)); }
    }
    // the higher-precision values reported in the text
    const double p_null = p_point(model, 1.0).p;
    const double p_two = p_point(model, 2.0).p;
    if (!cell_ok(p_null, 0.0505, 0.00005)) out.fail("p(HR=1)=" + fmt(p_null) + " vs 0.0505");
    if (!cell_ok(p_two, 0.373, 0.0005)) out.fail("p(HR=2)=" + fmt(p_two) + " vs 0.373");

    const double elapsed = seconds_since(t0);
    if (elapsed >= 1.0) out.fail("runtime " + fmt(elapsed) + "s >= 1s");
    out.note(std::to_string(24 - bad) + "/24 cells at printed precision, p(1)=" + fmt(p_null) +
             ", p(2)=" + fmt(p_two) + ", " + fmt(elapsed) + "s");
    return out;
}

// --------------------------------------------------------------------------
// 3. Interval round trip: recover + 95% interval returns (0.997, 2.59)
//    within 0.001 relative; 75% and 99% intervals strictly nested around it.
// --------------------------------------------------------------------------
Outcome criterion3() {
    Outcome out;
    const auto model = brown_model();
    const auto c95 = compatibility_interval(model, 0.95);
    const double rel_lo = std::fabs(c95.lower - 0.997) / 0.997;
    const double rel_hi = std::fabs(c95.upper - 2.59) / 2.59;
    if (rel_lo > 0.001) out.fail("lower " + fmt(c95.lower) + " vs 0.997: rel " + fmt(rel_lo) + " > 0.001");
    if (rel_hi > 0.001) out.fail("upper " + fmt(c95.upper) + " vs 2.59: rel " + fmt(rel_hi) + " > 0.001");

    const auto c75 = compatibility_interval(model, 0.75);
    const auto c99 = compatibility_interval(model, 0.99);
    const bool nested = c75.lower > c95.lower && c75.upper < c95.upper &&
                        c99.lower < c95.lower && c99.upper > c95.upper;
    if (!nested) out.fail("75/99% intervals are not strictly nested around the 95%");
    out.note("CI95=(" + fmt(c95.lower) + ", " + fmt(c95.upper) + "), nesting " +
             (nested ? "ok" : "violated"));
    return out;
}

// --------------------------------------------------------------------------
// 4. Duality property suite over 1,000 randomized models/levels plus the
//    conversion-chain and additivity laws. Runtime < 10 s.
// --------------------------------------------------------------------------
Outcome criterion4() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(160520);
    std::uniform_real_distribution<double> um(-2.5, 2.5), ud(0.05, 1.5), ul(0.001, 0.999);

    double worst_duality = 0.0;
    for (int i = 0; i < 1000; ++i) {
        NormalApprox model;
        model.mean = um(rng);
        model.sd = ud(rng);
        model.scale = (rng() & 1u) ? Scale::ratio : Scale::difference;
        const double level = ul(rng);
        const auto ci = compatibility_interval(model, level);
        worst_duality = std::max(worst_duality,
                                 std::fabs(p_point(model, ci.lower).p - (1.0 - level)));
        worst_duality = std::max(worst_duality,
                                 std::fabs(p_point(model, ci.upper).p - (1.0 - level)));
    }
    if (worst_duality > 1e-9) out.fail("endpoint duality worst " + fmt(worst_duality) + " > 1e-9");

    std::uniform_real_distribution<double> ue(-280.0, 0.0);
    double worst_chain = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double p = std::pow(10.0, ue(rng));
        const double back = chi2_survival_1df(deviance_from_p(Probability(p))).value();
        worst_chain = std::max(worst_chain, std::fabs(back - p) / p);
    }
    if (worst_chain > 1e-9) out.fail("conversion chain worst rel " + fmt(worst_chain) + " > 1e-9");

    std::uniform_real_distribution<double> ua(-140.0, 0.0);
    double worst_add = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double p1 = std::pow(10.0, ua(rng)), p2 = std::pow(10.0, ua(rng));
        const double lhs = s_value(Probability(p1 * p2), LogBase::bits);
        const double rhs = s_value(Probability(p1), LogBase::bits) +
                           s_value(Probability(p2), LogBase::bits);
        worst_add = std::max(worst_add, std::fabs(lhs - rhs));
    }
    if (worst_add > 1e-10) out.fail("additivity worst " + fmt(worst_add) + " > 1e-10");

    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0) out.fail("runtime " + fmt(elapsed) + "s >= 10s");
    out.note("duality " + fmt(worst_duality) + ", chain rel " + fmt(worst_chain) +
             ", additivity " + fmt(worst_add) + ", " + fmt(elapsed) + "s");
    return out;
}

// --------------------------------------------------------------------------
// 5. Likelihood correspondence: the 1/6.83 likelihood interval matches the
//    95% compatibility interval to 3 significant digits on the Brown model.
// --------------------------------------------------------------------------
Outcome criterion5() {
    Outcome out;
    const auto model = brown_model();
    const auto li = likelihood_interval(model, 6.83);
    const auto ci = compatibility_interval(model, 0.95);
    auto sig3_half_unit = [](double v) {
        return 0.5 * std::pow(10.0, std::floor(std::log10(std::fabs(v))) - 2.0);
    };
    if (std::fabs(li.lower - ci.lower) > sig3_half_unit(ci.lower))
        out.fail("lower: LI " + fmt(li.lower) + " vs CI " + fmt(ci.lower));
    if (std::fabs(li.upper - ci.upper) > sig3_half_unit(ci.upper))
        out.fail("upper: LI " + fmt(li.upper) + " vs CI " + fmt(ci.upper));
    out.note("LI=(" + fmt(li.lower) + ", " + fmt(li.upper) + ") vs CI=(" + fmt(ci.lower) +
             ", " + fmt(ci.upper) + ")");
    return out;
}

// --------------------------------------------------------------------------
// 6. Combination: K=1 identity exact; K=2 at (0.05, 0.05) within 1e-4 of the
//    quadrature oracle value 0.0175; null calibration for K in {1,3,5} with
//    100,000 sims: mean within 1% of K, KS below the 1% critical value.
//    Runtime < 60 s.
// --------------------------------------------------------------------------
Outcome criterion6() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();

    for (double p : {0.05, 0.37, 1.0, 3.2e-7}) {
        CombinationInput one;
        one.p_values = {Probability(p)};
        if (combine(one).combined_p != p) out.fail("K=1 identity not exact at p=" + fmt(p));
    }

    CombinationInput two;
    two.p_values = {Probability(0.05), Probability(0.05)};
    const auto ev = combine(two);
    if (std::fabs(ev.combined_p - 0.0175) > 0.0001)
        out.fail("K=2 combined_p " + fmt(ev.combined_p) + " not within 0.0175 +- 0.0001");
    const double quad = oracle::chi2_survival_quadrature(ev.statistic, 2);
    if (std::fabs(ev.combined_p - quad) > 1e-10)
        out.fail("K=2 combined_p differs from the quadrature oracle by " +
                 fmt(std::fabs(ev.combined_p - quad)));

    for (int k : {1, 3, 5}) {
        const auto rep = null_calibration(k, 100000, 424242);
        if (std::fabs(rep.mean_sum_s_nats - k) > 0.01 * k)
            out.fail("K=" + std::to_string(k) + " mean " + fmt(rep.mean_sum_s_nats) +
                     " not within 1% of K");
        if (!(rep.ks_distance < rep.ks_critical_1pct))
            out.fail("K=" + std::to_string(k) + " KS " + fmt(rep.ks_distance) +
                     " >= critical " + fmt(rep.ks_critical_1pct));
    }

    const double elapsed = seconds_since(t0);
    if (elapsed >= 60.0) out.fail("runtime " + fmt(elapsed) + "s >= 60s");
    out.note("combined_p=" + fmt(ev.combined_p) + ", calibration ok, " + fmt(elapsed) + "s");
    return out;
}

// --------------------------------------------------------------------------
// 7. Special-function oracles: normal CDF within 1e-14 of the independent
//    series/continued-fraction oracle on |z| <= 8 (10,000 points); even-df
//    chi-square survival within 1e-10 of quadrature for x in [0,100], K<=20.
// --------------------------------------------------------------------------
Outcome criterion7() {
    Outcome out;
    double worst_cdf = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double z = -8.0 + 16.0 * i / 9999.0;
        const double got = std_normal_cdf(ZScore(z)).value();
        const double want = static_cast<double>(oracle::norm_cdf(static_cast<long double>(z)));
        worst_cdf = std::max(worst_cdf, std::fabs(got - want));
    }
    if (worst_cdf > 1e-14) out.fail("normal cdf worst abs " + fmt(worst_cdf) + " > 1e-14");

    double worst_chi = 0.0;
    for (int k = 1; k <= 20; ++k) {
        for (double x = 0.0; x <= 100.0; x += 2.5) {
            const double got = chi2_survival_even_df(x, 2 * k).value();
            const double want = oracle::chi2_survival_quadrature(x, k);
            worst_chi = std::max(worst_chi, std::fabs(got - want));
        }
    }
    if (worst_chi > 1e-10) out.fail("chi-square worst abs " + fmt(worst_chi) + " > 1e-10");
    out.note("cdf worst " + fmt(worst_cdf) + ", chi2 worst " + fmt(worst_chi));
    return out;
}

// --------------------------------------------------------------------------
// 8. Plot faithfulness: SVG reference-line crossings for alpha in
//    {0.25, 0.05, 0.01} lie within one grid step of the closed-form
//    interval endpoints.
// --------------------------------------------------------------------------
Outcome criterion8() {
    Outcome out;
    const auto model = brown_model();
    const auto cs = curve(model, default_grid(model));
    PlotSpec spec;
    spec.measure = Measure::p;
    spec.reference_lines = {0.25, 0.05, 0.01};
    const auto svg = emit_plot(cs, spec, Provenance{version, "acceptance"});

    const auto pts = svg_probe::parse_polyline(svg);
    const double step = (transform(model.scale, cs.grid.hi) - transform(model.scale, cs.grid.lo)) /
                        (cs.grid.count - 1);
    for (double alpha : {0.25, 0.05, 0.01}) {
        const auto xs = svg_probe::crossings(pts, alpha);
        if (xs.size() != 2) {
            out.fail("alpha " + fmt(alpha) + ": expected 2 crossings, found " +
                     std::to_string(xs.size()));
            continue;
        }
        const auto ci = compatibility_interval(model, 1.0 - alpha);
        const double err_lo = std::fabs(xs[0] - transform(model.scale, ci.lower));
        const double err_hi = std::fabs(xs[1] - transform(model.scale, ci.upper));
        if (err_lo > step) out.fail("alpha " + fmt(alpha) + " lower off by " + fmt(err_lo));
        if (err_hi > step) out.fail("alpha " + fmt(alpha) + " upper off by " + fmt(err_hi));
    }
    out.note("grid step " + fmt(step) + " on the transformed scale");
    return out;
}

// --------------------------------------------------------------------------
// 9. Narrative: contains "61%" and "160%", and neither "significant" nor
//    "confidence".
// --------------------------------------------------------------------------
Outcome criterion9() {
    Outcome out;
    const auto text = narrative(brown_model(), 0.95, "HDPS");
    auto has = [&](const char* needle) { return text.find(needle) != std::string::npos; };
    if (!has("61%")) out.fail("missing \"61%\"");
    if (!has("160%")) out.fail("missing \"160%\"");
    if (has("significant") || has("Significant")) out.fail("contains \"significant\"");
    if (has("confidence") || has("Confidence")) out.fail("contains \"confidence\"");
    out.note("narrative length " + std::to_string(text.size()) + " chars");
    return out;
}

struct Criterion {
    int number;
    const char* name;
    Outcome (*run)();
};

const Criterion criteria[] = {
    {1, "reference conversion table", criterion1},
    {2, "six-hypothesis hazard-ratio table", criterion2},
    {3, "interval round trip", criterion3},
    {4, "duality property suite", criterion4},
    {5, "likelihood correspondence", criterion5},
    {6, "evidence combination", criterion6},
    {7, "special-function oracles", criterion7},
    {8, "plot faithfulness", criterion8},
    {9, "narrative wording", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.number != only) continue;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s  criterion %d: %s%s%s\n", out.pass ? "PASS" : "FAIL", c.number, c.name,
                    out.detail.empty() ? "" : " -- ", out.detail.c_str());
        if (!out.pass) ++failures;
    }
    return failures;
}
