#pragma once

// Ingest reported study summaries (point estimate + interval) and recover the
// normal approximation on the analysis scale that everything downstream uses.

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "surprisal/errors.hpp"
#include "surprisal/special_functions.hpp"

namespace surprisal {

// ---------------------------------------------------------------------------
// Scale: ratio results are analysed on the log scale, differences as-is.
// ---------------------------------------------------------------------------

enum class Scale { ratio, difference };

inline const char* to_string(Scale s) {
    return s == Scale::ratio ? "ratio" : "difference";
}

inline Scale scale_from_string(std::string_view s) {
    if (s == "ratio") return Scale::ratio;
    if (s == "difference") return Scale::difference;
    throw input_error("unknown scale \"" + std::string(s) + "\" (expected \"ratio\" or \"difference\")");
}

// t(x): ln on the ratio scale (x > 0), identity on the difference scale.
inline double transform(Scale s, double x) {
    if (s == Scale::ratio) {
        if (!(x > 0.0))
            throw domain_error("value " + std::to_string(x) + " outside the ratio-scale domain (must be > 0)");
        return std::log(x);
    }
    if (!std::isfinite(x)) throw domain_error("value must be finite");
    return x;
}

inline double inverse_transform(Scale s, double x) {
    return s == Scale::ratio ? std::exp(x) : x;
}

// ---------------------------------------------------------------------------
// StudySummary
// ---------------------------------------------------------------------------

struct StudySummary {
    std::string label;
    double point = 0.0;   // natural scale
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;   // interval percentile level in (0,1), e.g. 0.95
    Scale scale = Scale::ratio;
    std::optional<double> se;  // optional standard error on the transformed scale
};

namespace detail {

inline std::string row_prefix(std::string_view context) {
    return context.empty() ? std::string() : std::string(context) + ": ";
}

}  // namespace detail

inline void validate_summary(const StudySummary& s, std::string_view context = {}) {
    const std::string at = detail::row_prefix(context);
    if (!std::isfinite(s.point) || !std::isfinite(s.lower) || !std::isfinite(s.upper))
        throw input_error(at + "point/lower/upper must be finite");
    if (!(s.lower < s.upper))
        throw input_error(at + "degenerate interval: lower (" + std::to_string(s.lower) +
                          ") must be below upper (" + std::to_string(s.upper) + ")");
    if (!(s.lower < s.point && s.point < s.upper))
        throw input_error(at + "point estimate must lie strictly inside (lower, upper)");
    if (!(s.level > 0.0 && s.level < 1.0))
        throw input_error(at + "level must lie in (0,1)");
    if (s.scale == Scale::ratio && !(s.lower > 0.0))
        throw input_error(at + "ratio-scale values must be positive");
    if (s.se && !(*s.se > 0.0))
        throw input_error(at + "se must be positive");
}

// Build a summary from a standard error instead of explicit bounds: the
// interval is synthesized on the transformed scale at the given level.
inline StudySummary summary_from_se(std::string label, double point, double se,
                                    double level, Scale scale) {
    if (!(se > 0.0) || !std::isfinite(se)) throw input_error("se must be a positive finite number");
    if (!(level > 0.0 && level < 1.0)) throw input_error("level must lie in (0,1)");
    double q;
    try {
        q = std_normal_quantile(Probability(0.5 * (1.0 + level))).value();
    } catch (const domain_error& e) {
        throw input_error(std::string("level too extreme to synthesize an interval: ") + e.what());
    }
    const double t = transform(scale, point);
    StudySummary s;
    s.label = std::move(label);
    s.point = point;
    s.lower = inverse_transform(scale, t - q * se);
    s.upper = inverse_transform(scale, t + q * se);
    s.level = level;
    s.scale = scale;
    s.se = se;
    validate_summary(s);
    return s;
}

// ---------------------------------------------------------------------------
// NormalApprox: the recovered test model on the transformed scale.
// ---------------------------------------------------------------------------

struct NormalApprox {
    double mean = 0.0;  // m on the transformed scale
    double sd = 1.0;    // d > 0 on the transformed scale
    Scale scale = Scale::ratio;
    // |upper half-width - lower half-width| / sd on the transformed scale;
    // values above the threshold mean the normal approximation is strained.
    double asymmetry = 0.0;
    bool asymmetry_warning = false;
};

inline constexpr double asymmetry_warn_threshold = 0.01;

// m = t(point); d = (t(upper) - t(lower)) / (2 q((1+level)/2)), i.e. the
// average of the two half-widths divided by the quantile. Bounds and se are
// cross-checked when both are present.
inline NormalApprox recover_normal_approx(const StudySummary& s) {
    validate_summary(s);
    double q;
    try {
        q = std_normal_quantile(Probability(0.5 * (1.0 + s.level))).value();
    } catch (const domain_error& e) {
        throw input_error(std::string("level too extreme to recover a model: ") + e.what());
    }
    const double tp = transform(s.scale, s.point);
    const double tl = transform(s.scale, s.lower);
    const double tu = transform(s.scale, s.upper);

    NormalApprox model;
    model.mean = tp;
    model.sd = (tu - tl) / (2.0 * q);
    model.scale = s.scale;
    if (!(model.sd > 0.0) || !std::isfinite(model.sd))
        throw input_error("recovered sd is not a positive finite number");
    if (s.se) {
        const double rel = std::fabs(model.sd - *s.se) / *s.se;
        if (rel > 0.01)
            throw input_error("se (" + std::to_string(*s.se) + ") and interval-implied sd (" +
                              std::to_string(model.sd) + ") disagree by " + std::to_string(rel * 100.0) +
                              "%; inputs are inconsistent");
    }
    model.asymmetry = std::fabs((tu - tp) - (tp - tl)) / model.sd;
    model.asymmetry_warning = model.asymmetry > asymmetry_warn_threshold;
    return model;
}

// ---------------------------------------------------------------------------
// File ingestion. CSV schema (header required, exact names, any order):
//   label,point,lower,upper,level,scale[,se]
// JSON: array of objects with the same keys.
// A second schema carries bare p values for evidence combination:
//   label,p
// ---------------------------------------------------------------------------

enum class FileFormat { csv, json };

struct LabeledP {
    std::string label;
    Probability p;
};

namespace detail {

inline double parse_number(std::string_view text, const std::string& where) {
    double out = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw input_error(where + ": cannot parse number from \"" + std::string(text) + "\"");
    return out;
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_row(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted)
        throw input_error("line " + std::to_string(line_no) + ": unterminated quote");
    out.push_back(std::move(field));
    return out;
}

inline std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    std::size_t b = 0, e = s.size();
    while (b < e && issp(s[b])) ++b;
    while (e > b && issp(s[e - 1])) --e;
    return s.substr(b, e - b);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // trimmed cells
    std::vector<std::size_t> line_numbers;
};

inline CsvTable parse_csv(std::string_view bytes) {
    CsvTable t;
    std::size_t pos = 0, line_no = 0;
    while (pos <= bytes.size()) {
        std::size_t nl = bytes.find('\n', pos);
        std::string_view line = bytes.substr(pos, nl == std::string_view::npos ? bytes.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? bytes.size() + 1 : nl + 1;
        ++line_no;
        std::string trimmed = trim(std::string(line));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        auto cells = split_csv_row(trimmed, line_no);
        for (auto& c : cells) c = trim(std::move(c));
        if (t.header.empty()) {
            t.header = std::move(cells);
        } else {
            if (cells.size() != t.header.size())
                throw input_error("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(cells.size()));
            t.rows.push_back(std::move(cells));
            t.line_numbers.push_back(line_no);
        }
    }
    if (t.header.empty()) throw input_error("empty input: missing CSV header");
    return t;
}

inline std::size_t column_index(const CsvTable& t, std::string_view name, bool required) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    if (required)
        throw input_error("missing required column \"" + std::string(name) + "\"");
    return static_cast<std::size_t>(-1);
}

}  // namespace detail

inline std::vector<StudySummary> parse_study_csv(std::string_view bytes) {
    auto table = detail::parse_csv(bytes);
    const auto ci_label = detail::column_index(table, "label", true);
    const auto ci_point = detail::column_index(table, "point", true);
    const auto ci_lower = detail::column_index(table, "lower", true);
    const auto ci_upper = detail::column_index(table, "upper", true);
    const auto ci_level = detail::column_index(table, "level", true);
    const auto ci_scale = detail::column_index(table, "scale", true);
    const auto ci_se = detail::column_index(table, "se", false);

    std::vector<StudySummary> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        const std::string where = "row " + std::to_string(r + 1);
        StudySummary s;
        s.label = cells[ci_label];
        s.level = detail::parse_number(cells[ci_level], where + " field level");
        s.scale = scale_from_string(cells[ci_scale]);
        s.point = detail::parse_number(cells[ci_point], where + " field point");
        const bool have_se = ci_se != static_cast<std::size_t>(-1) && !cells[ci_se].empty();
        const bool have_bounds = !cells[ci_lower].empty() || !cells[ci_upper].empty();
        if (have_bounds) {
            s.lower = detail::parse_number(cells[ci_lower], where + " field lower");
            s.upper = detail::parse_number(cells[ci_upper], where + " field upper");
            if (have_se) s.se = detail::parse_number(cells[ci_se], where + " field se");
        } else if (have_se) {
            double se = detail::parse_number(cells[ci_se], where + " field se");
            try {
                s = summary_from_se(s.label, s.point, se, s.level, s.scale);
            } catch (const error& e) {
                throw input_error(where + ": " + e.what());
            }
            out.push_back(std::move(s));
            continue;
        } else {
            throw input_error(where + ": need either lower/upper bounds or an se value");
        }
        validate_summary(s, where);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<StudySummary> parse_study_json(std::string_view bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_array()) throw input_error("JSON input must be an array of study objects");
    std::vector<StudySummary> out;
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const std::string where = "record " + std::to_string(r + 1);
        const auto& obj = doc[r];
        if (!obj.is_object()) throw input_error(where + ": expected an object");
        auto need = [&](const char* key) -> const nlohmann::json& {
            auto it = obj.find(key);
            if (it == obj.end()) throw input_error(where + ": missing key \"" + key + "\"");
            return *it;
        };
        auto num = [&](const char* key) {
            const auto& v = need(key);
            if (!v.is_number()) throw input_error(where + " field " + key + ": expected a number");
            return v.get<double>();
        };
        StudySummary s;
        const auto& lab = need("label");
        if (!lab.is_string()) throw input_error(where + " field label: expected a string");
        s.label = lab.get<std::string>();
        const auto& sc = need("scale");
        if (!sc.is_string()) throw input_error(where + " field scale: expected a string");
        s.scale = scale_from_string(sc.get<std::string>());
        s.point = num("point");
        s.level = num("level");
        const bool have_bounds = obj.contains("lower") || obj.contains("upper");
        const bool have_se = obj.contains("se") && !obj["se"].is_null();
        if (have_bounds) {
            s.lower = num("lower");
            s.upper = num("upper");
            if (have_se) s.se = num("se");
        } else if (have_se) {
            try {
                s = summary_from_se(s.label, s.point, num("se"), s.level, s.scale);
            } catch (const error& e) {
                throw input_error(where + ": " + e.what());
            }
            out.push_back(std::move(s));
            continue;
        } else {
            throw input_error(where + ": need either lower/upper bounds or an se value");
        }
        validate_summary(s, where);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<StudySummary> parse_study_file(std::string_view bytes, FileFormat format) {
    return format == FileFormat::csv ? parse_study_csv(bytes) : parse_study_json(bytes);
}

// p-value ingestion for cross-study combination (columns: label,p).
inline std::vector<LabeledP> parse_p_file(std::string_view bytes, FileFormat format) {
    std::vector<LabeledP> out;
    if (format == FileFormat::csv) {
        auto table = detail::parse_csv(bytes);
        const auto ci_label = detail::column_index(table, "label", true);
        const auto ci_p = detail::column_index(table, "p", true);
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const std::string where = "row " + std::to_string(r + 1);
            double v = detail::parse_number(table.rows[r][ci_p], where + " field p");
            try {
                out.push_back({table.rows[r][ci_label], Probability(v)});
            } catch (const domain_error& e) {
                throw input_error(where + ": " + e.what());
            }
        }
        return out;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_array()) throw input_error("JSON input must be an array of {label, p} objects");
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const std::string where = "record " + std::to_string(r + 1);
        const auto& obj = doc[r];
        if (!obj.is_object() || !obj.contains("label") || !obj.contains("p"))
            throw input_error(where + ": expected an object with \"label\" and \"p\"");
        if (!obj["p"].is_number()) throw input_error(where + " field p: expected a number");
        try {
            out.push_back({obj["label"].get<std::string>(), Probability(obj["p"].get<double>())});
        } catch (const domain_error& e) {
            throw input_error(where + ": " + e.what());
        }
    }
    return out;
}

}  // namespace surprisal
