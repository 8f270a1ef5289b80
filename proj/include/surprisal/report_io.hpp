#pragma once

// Serialization of analyses: tables as CSV/JSON/Markdown, curves as
// standalone SVG, and the recommended narrative wording. All emitters are
// deterministic: identical input and version produce identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surprisal/compat_engine.hpp"
#include "surprisal/errors.hpp"
#include "surprisal/evidence_combiner.hpp"
#include "surprisal/study_model.hpp"
#include "surprisal/version.hpp"

namespace surprisal {

// ---------------------------------------------------------------------------
// Formatting helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_sig3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    return out;
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

// FNV-1a 64-bit over a canonical serialization of the input; used as the
// provenance digest stamped into every emitted file.
inline std::string input_digest(std::string_view canonical) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string canonical_summary_string(const StudySummary& s) {
    std::string out = s.label;
    for (double v : {s.point, s.lower, s.upper, s.level}) {
        out += '|';
        out += detail::format_full(v);
    }
    out += '|';
    out += to_string(s.scale);
    if (s.se) {
        out += '|';
        out += detail::format_full(*s.se);
    }
    return out;
}

struct Provenance {
    std::string tool_version = version;
    std::string digest;
};

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

enum class TableFormat { csv, json, markdown };

struct TableRow {
    std::string hypothesis;
    double p = 1.0;
    double s_bits = 0.0;
    double mlr = 1.0;
    double deviance = 0.0;
};

inline TableRow to_table_row(const CompatPoint& cp) {
    return {cp.hypothesis.label(), cp.p, cp.s_bits, cp.mlr, cp.deviance};
}

inline TableRow to_table_row(const ConversionRow& row) {
    return {"p=" + detail::format_sig3(row.p), row.p, row.s_bits, row.mlr, row.deviance};
}

// Columns are fixed: hypothesis,p,s_bits,mlr,deviance. s columns follow the
// display rounding rule; everything else prints at 3 significant digits.
inline std::string emit_table(const std::vector<TableRow>& rows, TableFormat format,
                              const Provenance& prov) {
    if (rows.empty()) throw input_error("table has no rows");
    std::string out;
    switch (format) {
        case TableFormat::csv: {
            out += "# surprisal " + prov.tool_version + " digest=" + prov.digest + "\n";
            out += "hypothesis,p,s_bits,mlr,deviance\n";
            for (const auto& r : rows) {
                out += detail::csv_field(r.hypothesis);
                out += ',' + detail::format_sig3(r.p);
                out += ',' + display_round(r.s_bits);
                out += ',' + detail::format_sig3(r.mlr);
                out += ',' + detail::format_sig3(r.deviance);
                out += '\n';
            }
            break;
        }
        case TableFormat::json: {
            out += "{\"meta\":{\"tool_version\":\"" + detail::json_escape(prov.tool_version) +
                   "\",\"input_digest\":\"" + detail::json_escape(prov.digest) + "\"},\"rows\":[";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& r = rows[i];
                if (i) out += ',';
                out += "{\"hypothesis\":\"" + detail::json_escape(r.hypothesis) + "\"";
                out += ",\"p\":" + detail::format_sig3(r.p);
                out += ",\"s_bits\":" + display_round(r.s_bits);
                out += ",\"mlr\":" + detail::format_sig3(r.mlr);
                out += ",\"deviance\":" + detail::format_sig3(r.deviance);
                out += '}';
            }
            out += "]}\n";
            break;
        }
        case TableFormat::markdown: {
            out += "<!-- surprisal " + prov.tool_version + " digest=" + prov.digest + " -->\n";
            out += "| hypothesis | p | s_bits | mlr | deviance |\n";
            out += "|---|---|---|---|---|\n";
            for (const auto& r : rows) {
                out += "| " + r.hypothesis;
                out += " | " + detail::format_sig3(r.p);
                out += " | " + display_round(r.s_bits);
                out += " | " + detail::format_sig3(r.mlr);
                out += " | " + detail::format_sig3(r.deviance);
                out += " |\n";
            }
            break;
        }
    }
    return out;
}

// Parses a CSV produced by emit_table back into rows (comment lines skipped).
inline std::vector<TableRow> parse_table_csv(std::string_view bytes) {
    auto table = detail::parse_csv(bytes);
    const auto ci_h = detail::column_index(table, "hypothesis", true);
    const auto ci_p = detail::column_index(table, "p", true);
    const auto ci_s = detail::column_index(table, "s_bits", true);
    const auto ci_m = detail::column_index(table, "mlr", true);
    const auto ci_d = detail::column_index(table, "deviance", true);
    std::vector<TableRow> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where = "row " + std::to_string(r + 1);
        rows.push_back({table.rows[r][ci_h],
                        detail::parse_number(table.rows[r][ci_p], where),
                        detail::parse_number(table.rows[r][ci_s], where),
                        detail::parse_number(table.rows[r][ci_m], where),
                        detail::parse_number(table.rows[r][ci_d], where)});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Plots
// ---------------------------------------------------------------------------

enum class Measure { p, s_bits, rel_likelihood, deviance };

inline const char* to_string(Measure m) {
    switch (m) {
        case Measure::p: return "p";
        case Measure::s_bits: return "s_bits";
        case Measure::rel_likelihood: return "rel_likelihood";
        case Measure::deviance: return "deviance";
    }
    return "?";
}

inline Measure measure_from_string(std::string_view s) {
    if (s == "p") return Measure::p;
    if (s == "s_bits") return Measure::s_bits;
    if (s == "rel_likelihood") return Measure::rel_likelihood;
    if (s == "deviance") return Measure::deviance;
    throw input_error("unknown measure \"" + std::string(s) + "\"");
}

struct PlotSpec {
    Measure measure = Measure::p;
    double width = 640.0;   // abstract units
    double height = 400.0;
    // Horizontal reference lines in measure units (e.g. p levels 0.25/0.05/0.01).
    std::vector<double> reference_lines;
    // Optional shaded interval band on the parameter axis.
    std::optional<IntervalEstimate> band;
    std::string x_label = "parameter value";
};

namespace detail {

inline double measure_value(const CompatPoint& cp, Measure m) {
    switch (m) {
        case Measure::p: return cp.p;
        case Measure::s_bits: return cp.s_bits;
        case Measure::rel_likelihood: return cp.rel_likelihood;
        case Measure::deviance: return cp.deviance;
    }
    return 0.0;
}

inline const char* measure_axis_label(Measure m) {
    switch (m) {
        case Measure::p: return "p-value";
        case Measure::s_bits: return "s-value (bits)";
        case Measure::rel_likelihood: return "relative likelihood";
        case Measure::deviance: return "deviance";
    }
    return "?";
}

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Natural-scale tick positions: 1-2-5 decades for ratio scales, a nice
// linear step otherwise.
inline std::vector<double> axis_ticks(Scale scale, double lo, double hi) {
    std::vector<double> ticks;
    if (scale == Scale::ratio) {
        static constexpr double mant[3] = {1.0, 2.0, 5.0};
        const int klo = static_cast<int>(std::floor(std::log10(lo))) - 1;
        const int khi = static_cast<int>(std::ceil(std::log10(hi))) + 1;
        for (int k = klo; k <= khi; ++k) {
            for (double m : mant) {
                const double v = m * std::pow(10.0, k);
                if (v >= lo * 0.999999 && v <= hi * 1.000001) ticks.push_back(v);
            }
        }
        return ticks;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) { step = mag * m; break; }
    }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-9 * span; v += step) ticks.push_back(v);
    return ticks;
}

inline std::string trim_number_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

// Standalone SVG 1.1: a polyline through the curve samples with labeled axes
// (natural-scale ticks), horizontal reference lines, an optional shaded
// interval band, and a right-hand CI% axis for the p measure.
inline std::string emit_plot(const CurveSample& curve, const PlotSpec& spec,
                             const Provenance& prov) {
    if (curve.points.size() < 2) throw input_error("curve needs at least two samples");
    for (double ref : spec.reference_lines) {
        const bool unit_measure = spec.measure == Measure::p || spec.measure == Measure::rel_likelihood;
        if (unit_measure && !(ref > 0.0 && ref < 1.0))
            throw input_error("reference line " + detail::format_sig3(ref) + " not valid for measure " +
                              to_string(spec.measure) + " (must lie in (0,1))");
        if (!unit_measure && !(ref > 0.0) )
            throw input_error("reference line " + detail::format_sig3(ref) + " not valid for measure " +
                              to_string(spec.measure) + " (must be positive)");
    }

    const double W = spec.width, H = spec.height;
    const double x0 = 70.0, y0 = 20.0;
    const double pw = W - 140.0, ph = H - 70.0;

    const double xlo = transform(curve.scale, curve.points.front().value);
    const double xhi = transform(curve.scale, curve.points.back().value);
    double ylo = 0.0, yhi = 1.0;
    if (spec.measure == Measure::s_bits || spec.measure == Measure::deviance) {
        double m = 0.0;
        for (const auto& pt : curve.points)
            m = std::max(m, detail::measure_value(pt.measures, spec.measure));
        for (double ref : spec.reference_lines) m = std::max(m, ref);
        yhi = std::max(1.0, std::ceil(m));
    }

    auto sx = [&](double t) { return x0 + (t - xlo) / (xhi - xlo) * pw; };
    auto sy = [&](double v) { return y0 + ph - (v - ylo) / (yhi - ylo) * ph; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           detail::fmt2(W) + "\" height=\"" + detail::fmt2(H) + "\" viewBox=\"0 0 " +
           detail::fmt2(W) + " " + detail::fmt2(H) + "\">\n";
    svg += "<!-- surprisal " + prov.tool_version + " digest=" + prov.digest + " -->\n";
    svg += "<!-- plot-area x0=" + detail::format_full(x0) + " y0=" + detail::format_full(y0) +
           " w=" + detail::format_full(pw) + " h=" + detail::format_full(ph) +
           " xlo=" + detail::format_full(xlo) + " xhi=" + detail::format_full(xhi) +
           " ylo=" + detail::format_full(ylo) + " yhi=" + detail::format_full(yhi) +
           " measure=" + to_string(spec.measure) + " scale=" + to_string(curve.scale) + " -->\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + detail::fmt2(W) + "\" height=\"" + detail::fmt2(H) +
           "\" fill=\"white\"/>\n";

    // interval band under everything else
    if (spec.band) {
        const double bx0 = sx(transform(curve.scale, spec.band->lower));
        const double bx1 = sx(transform(curve.scale, spec.band->upper));
        svg += "<rect x=\"" + detail::fmt2(bx0) + "\" y=\"" + detail::fmt2(y0) + "\" width=\"" +
               detail::fmt2(bx1 - bx0) + "\" height=\"" + detail::fmt2(ph) +
               "\" fill=\"#dce9f6\"/>\n";
    }

    // frame
    svg += "<rect x=\"" + detail::fmt2(x0) + "\" y=\"" + detail::fmt2(y0) + "\" width=\"" +
           detail::fmt2(pw) + "\" height=\"" + detail::fmt2(ph) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // x ticks on the natural scale
    for (double tick : detail::axis_ticks(curve.scale, curve.points.front().value,
                                          curve.points.back().value)) {
        const double px = sx(transform(curve.scale, tick));
        svg += "<line x1=\"" + detail::fmt2(px) + "\" y1=\"" + detail::fmt2(y0 + ph) + "\" x2=\"" +
               detail::fmt2(px) + "\" y2=\"" + detail::fmt2(y0 + ph + 5.0) +
               "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + detail::fmt2(px) + "\" y=\"" + detail::fmt2(y0 + ph + 18.0) +
               "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" +
               detail::trim_number_label(tick) + "</text>\n";
    }

    // y ticks
    {
        std::vector<double> yticks;
        if (spec.measure == Measure::p || spec.measure == Measure::rel_likelihood) {
            yticks = {0.0, 0.25, 0.5, 0.75, 1.0};
        } else {
            const double step = yhi / 5.0;
            for (int i = 0; i <= 5; ++i) yticks.push_back(step * i);
        }
        for (double tick : yticks) {
            const double py = sy(tick);
            svg += "<line x1=\"" + detail::fmt2(x0 - 5.0) + "\" y1=\"" + detail::fmt2(py) +
                   "\" x2=\"" + detail::fmt2(x0) + "\" y2=\"" + detail::fmt2(py) +
                   "\" stroke=\"black\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + detail::fmt2(x0 - 9.0) + "\" y=\"" + detail::fmt2(py + 4.0) +
                   "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" +
                   detail::trim_number_label(tick) + "</text>\n";
        }
    }

    // reference lines, with CI% labels on the right axis for the p measure
    for (double ref : spec.reference_lines) {
        const double py = sy(ref);
        svg += "<line class=\"refline\" x1=\"" + detail::fmt2(x0) + "\" y1=\"" + detail::fmt2(py) +
               "\" x2=\"" + detail::fmt2(x0 + pw) + "\" y2=\"" + detail::fmt2(py) +
               "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";
        std::string label = detail::trim_number_label(ref);
        if (spec.measure == Measure::p)
            label = detail::trim_number_label((1.0 - ref) * 100.0) + "% CI";
        svg += "<text x=\"" + detail::fmt2(x0 + pw + 8.0) + "\" y=\"" + detail::fmt2(py + 4.0) +
               "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"start\">" + label +
               "</text>\n";
    }

    // the curve itself
    svg += "<polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (i) svg += ' ';
        const double px = sx(transform(curve.scale, curve.points[i].value));
        const double py = sy(detail::measure_value(curve.points[i].measures, spec.measure));
        svg += detail::fmt2(px) + "," + detail::fmt2(py);
    }
    svg += "\"/>\n";

    // axis labels
    svg += "<text x=\"" + detail::fmt2(x0 + pw / 2.0) + "\" y=\"" + detail::fmt2(H - 8.0) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">" +
           spec.x_label + "</text>\n";
    svg += "<text x=\"14\" y=\"" + detail::fmt2(y0 + ph / 2.0) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           detail::fmt2(y0 + ph / 2.0) + ")\">" + detail::measure_axis_label(spec.measure) +
           "</text>\n";
    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// Narrative
// ---------------------------------------------------------------------------

namespace detail {

// Percent change implied by a ratio, rounded for prose: nearest integer below
// 100%, nearest ten above (so 159.5% reads as "160%").
inline long percent_for_prose(double ratio) {
    const double pct = std::fabs(ratio - 1.0) * 100.0;
    if (pct >= 100.0) return std::lround(pct / 10.0) * 10;
    return std::lround(pct);
}

inline std::string ratio_phrase(double hr) {
    if (hr > 1.0) return "a " + std::to_string(percent_for_prose(hr)) + "% hazard increase";
    if (hr < 1.0) return "a " + std::to_string(percent_for_prose(hr)) + "% hazard reduction";
    return "no elevation";
}

}  // namespace detail

// Fills the recommended unconditional wording with the point estimate as a
// percent change and the compatibility interval at the given level. Avoids
// declaring results "significant" or describing the interval as "confidence".
inline std::string narrative(const NormalApprox& model, double level,
                             std::string_view context_label) {
    const IntervalEstimate ci = compatibility_interval(model, level);
    const double alpha = 1.0 - level;
    const std::string alpha_text = detail::format_sig3(alpha);
    std::string text;

    if (model.scale == Scale::ratio) {
        const double point = inverse_transform(model.scale, model.mean);
        const long pct = detail::percent_for_prose(point);
        if (point == 1.0 || pct == 0) {
            text += "After adjustment (" + std::string(context_label) +
                    "), the estimate showed no change in hazard (0%).";
        } else if (point > 1.0) {
            text += "After adjustment (" + std::string(context_label) + "), an estimated " +
                    std::to_string(pct) + "% hazard elevation remained.";
        } else {
            text += "After adjustment (" + std::string(context_label) + "), an estimated " +
                    std::to_string(pct) + "% hazard reduction remained.";
        }
        const std::string lower_phrase =
            ci.lower <= 1.0 ? std::string("no elevation") : detail::ratio_phrase(ci.lower);
        text += " Under the same background model, every hypothesis from " + lower_phrase +
                " up to " + detail::ratio_phrase(ci.upper) + " had p > " + alpha_text +
                ", so hazard ratios across that range are more compatible with the data than values outside it.";
    } else {
        const double point = model.mean;
        text += "After adjustment (" + std::string(context_label) + "), an estimated difference of " +
                detail::format_sig3(point) + " remained.";
        text += " Under the same background model, every hypothesized difference from " +
                detail::format_sig3(ci.lower) + " to " + detail::format_sig3(ci.upper) +
                " had p > " + alpha_text +
                ", so values across that range are more compatible with the data than values outside it.";
    }
    text += " These statements are conditional on the background model; they do not give the"
            " probability that the true value lies in the interval, and imprecision this wide"
            " leaves room for bias as well as for real effects.";
    return text;
}

// ---------------------------------------------------------------------------
// Report bundle
// ---------------------------------------------------------------------------

struct ReportBundle {
    std::string study_label;
    StudySummary summary;
    NormalApprox model;
    std::vector<CompatPoint> hypothesis_rows;
    std::vector<IntervalEstimate> intervals;
    CurveSample curve_sample;
    std::string narrative_text;
    Provenance provenance;
};

inline ReportBundle build_report(const StudySummary& summary,
                                 std::vector<Hypothesis> hypotheses = {},
                                 std::vector<double> levels = {0.75, 0.95, 0.99}) {
    ReportBundle bundle;
    bundle.study_label = summary.label;
    bundle.summary = summary;
    bundle.model = recover_normal_approx(summary);
    if (hypotheses.empty()) {
        const double null_value = summary.scale == Scale::ratio ? 1.0 : 0.0;
        hypotheses.push_back(Hypothesis::point(null_value));
        hypotheses.push_back(Hypothesis::point(summary.point));
    }
    bundle.hypothesis_rows = hypothesis_table(bundle.model, hypotheses);
    for (double level : levels)
        bundle.intervals.push_back(compatibility_interval(bundle.model, level));
    bundle.curve_sample = curve(bundle.model, default_grid(bundle.model));
    bundle.narrative_text = narrative(bundle.model, summary.level, summary.label);
    bundle.provenance = Provenance{version, input_digest(canonical_summary_string(summary))};
    return bundle;
}

inline std::string emit_report_json(const ReportBundle& b) {
    std::string out;
    out += "{\"meta\":{\"tool_version\":\"" + detail::json_escape(b.provenance.tool_version) +
           "\",\"input_digest\":\"" + detail::json_escape(b.provenance.digest) + "\"},";
    out += "\"study\":{\"label\":\"" + detail::json_escape(b.study_label) + "\",\"point\":" +
           detail::format_full(b.summary.point) + ",\"lower\":" + detail::format_full(b.summary.lower) +
           ",\"upper\":" + detail::format_full(b.summary.upper) + ",\"level\":" +
           detail::format_full(b.summary.level) + ",\"scale\":\"" + to_string(b.summary.scale) + "\"},";
    out += "\"model\":{\"mean\":" + detail::format_full(b.model.mean) + ",\"sd\":" +
           detail::format_full(b.model.sd) + ",\"scale\":\"" + to_string(b.model.scale) +
           "\",\"asymmetry\":" + detail::format_full(b.model.asymmetry) +
           ",\"asymmetry_warning\":" + (b.model.asymmetry_warning ? "true" : "false") + "},";
    out += "\"hypotheses\":[";
    for (std::size_t i = 0; i < b.hypothesis_rows.size(); ++i) {
        const auto& cp = b.hypothesis_rows[i];
        if (i) out += ',';
        out += "{\"hypothesis\":\"" + detail::json_escape(cp.hypothesis.label()) + "\",\"z\":" +
               detail::format_full(cp.z) + ",\"p\":" + detail::format_full(cp.p) + ",\"s_bits\":" +
               detail::format_full(cp.s_bits) + ",\"s_nats\":" + detail::format_full(cp.s_nats) +
               ",\"mlr\":" + detail::format_full(cp.mlr) + ",\"deviance\":" +
               detail::format_full(cp.deviance) + ",\"rel_likelihood\":" +
               detail::format_full(cp.rel_likelihood) +
               ",\"mlr_extrapolated\":" + (cp.mlr_extrapolated ? "true" : "false") +
               ",\"saturated\":" + (cp.saturated ? "true" : "false") + "}";
    }
    out += "],\"intervals\":[";
    for (std::size_t i = 0; i < b.intervals.size(); ++i) {
        const auto& iv = b.intervals[i];
        if (i) out += ',';
        out += "{\"kind\":\"";
        out += iv.kind == IntervalEstimate::Kind::compatibility ? "compatibility" : "likelihood";
        out += "\",\"level\":" + detail::format_full(iv.level) + ",\"lower\":" +
               detail::format_full(iv.lower) + ",\"upper\":" + detail::format_full(iv.upper);
        if (iv.mlr_cutoff) out += ",\"mlr_cutoff\":" + detail::format_full(*iv.mlr_cutoff);
        out += '}';
    }
    out += "],\"curve\":[";
    for (std::size_t i = 0; i < b.curve_sample.points.size(); ++i) {
        const auto& pt = b.curve_sample.points[i];
        if (i) out += ',';
        out += "{\"value\":" + detail::format_full(pt.value) + ",\"p\":" +
               detail::format_full(pt.measures.p) + ",\"s_bits\":" +
               detail::format_full(pt.measures.s_bits) + ",\"mlr\":" +
               detail::format_full(pt.measures.mlr) + ",\"deviance\":" +
               detail::format_full(pt.measures.deviance) + ",\"rel_likelihood\":" +
               detail::format_full(pt.measures.rel_likelihood) + "}";
    }
    out += "],\"narrative\":\"" + detail::json_escape(b.narrative_text) + "\"}\n";
    return out;
}

inline std::string emit_report_markdown(const ReportBundle& b) {
    std::string out;
    out += "<!-- surprisal " + b.provenance.tool_version + " digest=" + b.provenance.digest + " -->\n";
    out += "# Compatibility report: " + b.study_label + "\n\n";
    out += "Reported summary: point " + detail::format_sig3(b.summary.point) + ", " +
           detail::format_sig3(b.summary.level * 100.0) + "% interval (" +
           detail::format_sig3(b.summary.lower) + ", " + detail::format_sig3(b.summary.upper) +
           ") on the " + to_string(b.summary.scale) + " scale.\n\n";
    out += "Recovered model: mean " + detail::format_sig3(b.model.mean) + ", sd " +
           detail::format_sig3(b.model.sd) + " on the transformed scale";
    if (b.model.asymmetry_warning)
        out += " (interval asymmetry " + detail::format_sig3(b.model.asymmetry) +
               "; the normal approximation is strained)";
    out += ".\n\n## Test hypotheses\n\n";
    std::vector<TableRow> rows;
    rows.reserve(b.hypothesis_rows.size());
    for (const auto& cp : b.hypothesis_rows) rows.push_back(to_table_row(cp));
    out += emit_table(rows, TableFormat::markdown, b.provenance);
    out += "\n## Compatibility intervals\n\n";
    out += "| level | lower | upper |\n|---|---|---|\n";
    for (const auto& iv : b.intervals) {
        out += "| " + detail::format_sig3(iv.level * 100.0) + "% | " +
               detail::format_sig3(iv.lower) + " | " + detail::format_sig3(iv.upper) + " |\n";
    }
    out += "\n## Narrative\n\n" + b.narrative_text + "\n";
    return out;
}

}  // namespace surprisal
