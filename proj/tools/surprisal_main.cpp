// Command-line front end: converts reported summary statistics into
// compatibility/surprisal analyses. Subcommands: convert, stable, table,
// interval, curve, combine, report.
//
// Exit codes: 0 success, 2 input/validation error, 3 domain/saturation error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "surprisal/surprisal.hpp"

namespace {

using namespace surprisal;

// ---------------------------------------------------------------------------
// shared option bundles
// ---------------------------------------------------------------------------

struct ModelArgs {
    double point = 0.0, lower = 0.0, upper = 0.0, level = 0.95;
    std::string scale = "ratio";
    std::string label = "study";
    std::string input_path;
    bool inline_given = false;
};

struct OutputArgs {
    std::string out_path;
    bool force = false;
    std::string format = "csv";
};

void add_model_options(CLI::App* cmd, ModelArgs& args) {
    auto* point = cmd->add_option("--point", args.point, "point estimate (natural scale)");
    auto* lower = cmd->add_option("--lower", args.lower, "interval lower bound");
    auto* upper = cmd->add_option("--upper", args.upper, "interval upper bound");
    cmd->add_option("--level", args.level, "interval percentile level (default 0.95)");
    cmd->add_option("--scale", args.scale, "ratio|difference (default ratio)");
    cmd->add_option("--label", args.label, "study label (or row selector with --input)");
    cmd->add_option("--input", args.input_path, "study summary file (.csv or .json)");
    point->needs(lower);
    point->needs(upper);
    cmd->callback([&args, point]() { args.inline_given = point->count() > 0; });
}

void add_output_options(CLI::App* cmd, OutputArgs& args, bool with_format = true) {
    cmd->add_option("--out", args.out_path, "write results here instead of stdout");
    cmd->add_flag("--force", args.force, "overwrite an existing output path");
    if (with_format)
        cmd->add_option("--format", args.format, "csv|json|markdown (default csv)");
}

FileFormat format_from_path(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? FileFormat::json
                                                                       : FileFormat::csv;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const OutputArgs& out, const std::string& content) {
    if (out.out_path.empty()) {
        std::cout << content;
        return;
    }
    if (std::filesystem::exists(out.out_path) && !out.force)
        throw input_error("output path exists: " + out.out_path + " (pass --force to overwrite)");
    std::ofstream f(out.out_path, std::ios::binary);
    if (!f) throw input_error("cannot open output path: " + out.out_path);
    f << content;
}

void write_path(const std::string& path, bool force, const std::string& content) {
    OutputArgs out;
    out.out_path = path;
    out.force = force;
    write_output(out, content);
}

StudySummary resolve_summary(const ModelArgs& args) {
    if (args.inline_given && !args.input_path.empty())
        throw input_error("both inline model flags and --input given; pass exactly one");
    if (!args.input_path.empty()) {
        const auto rows = parse_study_file(read_file(args.input_path),
                                           format_from_path(args.input_path));
        if (rows.empty()) throw input_error("no study rows in " + args.input_path);
        if (args.label != "study") {
            for (const auto& row : rows)
                if (row.label == args.label) return row;
            throw input_error("no row labeled \"" + args.label + "\" in " + args.input_path);
        }
        return rows.front();
    }
    if (!args.inline_given)
        throw input_error("model required: pass --point/--lower/--upper/--level/--scale or --input");
    StudySummary s;
    s.label = args.label;
    s.point = args.point;
    s.lower = args.lower;
    s.upper = args.upper;
    s.level = args.level;
    s.scale = scale_from_string(args.scale);
    validate_summary(s);
    return s;
}

TableFormat table_format(const std::string& name) {
    if (name == "csv") return TableFormat::csv;
    if (name == "json") return TableFormat::json;
    if (name == "markdown") return TableFormat::markdown;
    throw input_error("unknown format \"" + name + "\" (expected csv|json|markdown)");
}

std::vector<Hypothesis> parse_hypotheses(const std::string& text) {
    std::vector<Hypothesis> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
        if (tok.empty()) continue;
        try {
            if (tok.rfind("<=", 0) == 0) {
                out.push_back(Hypothesis::at_most(std::stod(tok.substr(2))));
            } else if (tok.rfind(">=", 0) == 0) {
                out.push_back(Hypothesis::at_least(std::stod(tok.substr(2))));
            } else if (tok.find("..") != std::string::npos) {
                const auto dots = tok.find("..");
                out.push_back(Hypothesis::interval(std::stod(tok.substr(0, dots)),
                                                   std::stod(tok.substr(dots + 2))));
            } else {
                out.push_back(Hypothesis::point(std::stod(tok)));
            }
        } catch (const std::invalid_argument&) {
            throw input_error("cannot parse hypothesis token \"" + tok + "\"");
        }
    }
    if (out.empty()) throw input_error("no hypotheses given");
    return out;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::invalid_argument&) {
            throw input_error(std::string("cannot parse ") + what + " token \"" + tok + "\"");
        }
    }
    return out;
}

std::string digest_for_numbers(const std::string& tag, const std::vector<double>& values) {
    std::string canon = tag;
    for (double v : values) {
        canon += '|';
        canon += surprisal::detail::format_full(v);
    }
    return input_digest(canon);
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_convert(const std::vector<double>& ps, const std::string& base, const OutputArgs& out) {
    const LogBase lb = base == "nats" ? LogBase::nats : LogBase::bits;
    std::string text;
    for (double pv : ps) {
        const Probability p(pv);
        const double s = s_value(p, lb);
        const double mlr = mlr_from_p(p);
        const double dev = deviance_from_p(p);
        text += "p=" + surprisal::detail::format_sig3(pv);
        if (lb == LogBase::bits)
            text += "  s=" + display_round(s) + " bits";
        else
            text += "  s=" + surprisal::detail::format_sig3(s) + " nats";
        text += "  mlr=" + surprisal::detail::format_sig3(mlr);
        text += "  deviance=" + surprisal::detail::format_sig3(dev) + "\n";
    }
    write_output(out, text);
    return 0;
}

int run_stable(const std::vector<double>& extra, const OutputArgs& out) {
    auto ps = canonical_p_values();
    std::vector<double> digest_values;
    for (const auto& p : ps) digest_values.push_back(p.value());
    for (double v : extra) {
        ps.emplace_back(v);
        digest_values.push_back(v);
    }
    std::vector<TableRow> rows;
    for (const auto& row : s_table(ps)) rows.push_back(to_table_row(row));
    const Provenance prov{version, digest_for_numbers("stable", digest_values)};
    write_output(out, emit_table(rows, table_format(out.format), prov));
    return 0;
}

int run_table(const ModelArgs& margs, const std::string& hyp_text, const OutputArgs& out) {
    const auto summary = resolve_summary(margs);
    const auto model = recover_normal_approx(summary);
    const auto rows_cp = hypothesis_table(model, parse_hypotheses(hyp_text));
    std::vector<TableRow> rows;
    rows.reserve(rows_cp.size());
    for (const auto& cp : rows_cp) rows.push_back(to_table_row(cp));
    const Provenance prov{version, input_digest(canonical_summary_string(summary))};
    write_output(out, emit_table(rows, table_format(out.format), prov));
    return 0;
}

int run_interval(const ModelArgs& margs, const std::string& levels_text,
                 const std::vector<double>& cutoffs, const OutputArgs& out) {
    const auto summary = resolve_summary(margs);
    const auto model = recover_normal_approx(summary);
    auto levels = parse_number_list(levels_text, "level");
    if (levels.empty()) levels = {0.75, 0.95, 0.99};

    std::vector<IntervalEstimate> intervals;
    for (double level : levels) intervals.push_back(compatibility_interval(model, level));
    for (double cutoff : cutoffs) intervals.push_back(likelihood_interval(model, cutoff));

    const Provenance prov{version, input_digest(canonical_summary_string(summary))};
    std::string text;
    const auto fmt = table_format(out.format);
    if (fmt == TableFormat::csv) {
        text += "# surprisal " + prov.tool_version + " digest=" + prov.digest + "\n";
        text += "kind,level,lower,upper,mlr_cutoff\n";
        for (const auto& iv : intervals) {
            text += iv.kind == IntervalEstimate::Kind::compatibility ? "compatibility" : "likelihood";
            text += ',' + surprisal::detail::format_sig3(iv.level);
            text += ',' + surprisal::detail::format_full(iv.lower);
            text += ',' + surprisal::detail::format_full(iv.upper);
            text += ',';
            if (iv.mlr_cutoff) text += surprisal::detail::format_sig3(*iv.mlr_cutoff);
            text += '\n';
        }
    } else if (fmt == TableFormat::json) {
        text += "{\"meta\":{\"tool_version\":\"" + prov.tool_version + "\",\"input_digest\":\"" +
                prov.digest + "\"},\"intervals\":[";
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            const auto& iv = intervals[i];
            if (i) text += ',';
            text += "{\"kind\":\"";
            text += iv.kind == IntervalEstimate::Kind::compatibility ? "compatibility" : "likelihood";
            text += "\",\"level\":" + surprisal::detail::format_full(iv.level) +
                    ",\"lower\":" + surprisal::detail::format_full(iv.lower) +
                    ",\"upper\":" + surprisal::detail::format_full(iv.upper);
            if (iv.mlr_cutoff)
                text += ",\"mlr_cutoff\":" + surprisal::detail::format_full(*iv.mlr_cutoff);
            text += '}';
        }
        text += "]}\n";
    } else {
        text += "<!-- surprisal " + prov.tool_version + " digest=" + prov.digest + " -->\n";
        text += "| kind | level | lower | upper | mlr_cutoff |\n|---|---|---|---|---|\n";
        for (const auto& iv : intervals) {
            text += "| ";
            text += iv.kind == IntervalEstimate::Kind::compatibility ? "compatibility" : "likelihood";
            text += " | " + surprisal::detail::format_sig3(iv.level);
            text += " | " + surprisal::detail::format_full(iv.lower);
            text += " | " + surprisal::detail::format_full(iv.upper);
            text += " | " + (iv.mlr_cutoff ? surprisal::detail::format_sig3(*iv.mlr_cutoff)
                                           : std::string("-"));
            text += " |\n";
        }
    }
    write_output(out, text);
    return 0;
}

int run_curve(const ModelArgs& margs, const std::string& measure_name, double grid_lo,
              double grid_hi, int grid_count, const std::string& refs_text,
              const std::string& band_text, const std::string& svg_path, const OutputArgs& out) {
    const auto summary = resolve_summary(margs);
    const auto model = recover_normal_approx(summary);
    GridSpec grid = default_grid(model);
    if (grid_lo != 0.0 || grid_hi != 0.0) {
        grid.lo = grid_lo;
        grid.hi = grid_hi;
    }
    if (grid_count > 0) grid.count = grid_count;
    const auto cs = curve(model, grid);
    const Provenance prov{version, input_digest(canonical_summary_string(summary))};

    if (!svg_path.empty()) {
        PlotSpec spec;
        spec.measure = measure_from_string(measure_name);
        if (!refs_text.empty())
            spec.reference_lines = parse_number_list(refs_text, "reference line");
        else if (spec.measure == Measure::p)
            spec.reference_lines = {0.25, 0.05, 0.01};
        if (!band_text.empty())
            spec.band = compatibility_interval(model, std::stod(band_text));
        spec.x_label = summary.scale == Scale::ratio ? "ratio" : "difference";
        write_path(svg_path, out.force, emit_plot(cs, spec, prov));
        return 0;
    }

    std::string text = "# surprisal " + prov.tool_version + " digest=" + prov.digest + "\n";
    text += "value,p,s_bits,s_nats,mlr,deviance,rel_likelihood\n";
    for (const auto& pt : cs.points) {
        text += surprisal::detail::format_full(pt.value);
        text += ',' + surprisal::detail::format_full(pt.measures.p);
        text += ',' + surprisal::detail::format_full(pt.measures.s_bits);
        text += ',' + surprisal::detail::format_full(pt.measures.s_nats);
        text += ',' + surprisal::detail::format_full(pt.measures.mlr);
        text += ',' + surprisal::detail::format_full(pt.measures.deviance);
        text += ',' + surprisal::detail::format_full(pt.measures.rel_likelihood);
        text += '\n';
    }
    write_output(out, text);
    return 0;
}

int run_combine(const std::vector<double>& ps_inline, const std::string& input_path,
                bool independence, const std::string& sided, bool calibrate, int k,
                std::size_t sims, std::uint64_t seed, const OutputArgs& out) {
    if (calibrate) {
        const auto rep = null_calibration(k, sims, seed);
        std::string text;
        text += "k=" + std::to_string(rep.k);
        text += " n_sims=" + std::to_string(rep.n_sims);
        text += " seed=" + std::to_string(rep.seed);
        text += " generator=" + std::string(rep.generator);
        text += " mean_sum_s_nats=" + surprisal::detail::format_sig3(rep.mean_sum_s_nats);
        text += " ks_distance=" + surprisal::detail::format_sig3(rep.ks_distance);
        text += " ks_critical_1pct=" + surprisal::detail::format_sig3(rep.ks_critical_1pct);
        text += std::string(" uniform_at_1pct=") + (rep.uniform_at_1pct ? "true" : "false") + "\n";
        write_output(out, text);
        return 0;
    }

    CombinationInput input;
    input.independence_asserted = independence;
    input.sidedness = sided == "one" ? "one-sided" : "two-sided";
    for (double v : ps_inline) input.p_values.emplace_back(v);
    if (!input_path.empty()) {
        for (const auto& lp : parse_p_file(read_file(input_path), format_from_path(input_path)))
            input.p_values.push_back(lp.p);
    }
    const auto ev = combine(input);
    std::string text;
    text += "k=" + std::to_string(ev.k);
    text += " sum_s_nats=" + surprisal::detail::format_sig3(ev.sum_s_nats);
    text += " statistic=" + surprisal::detail::format_sig3(ev.statistic);
    text += " df=" + std::to_string(ev.df);
    text += " combined_p=" + surprisal::detail::format_sig3(ev.combined_p);
    text += " combined_s_bits=" + display_round(ev.combined_s_bits);
    text += std::string(" independence_asserted=") + (ev.independence_asserted ? "true" : "false");
    text += " sidedness=" + ev.sidedness + "\n";
    write_output(out, text);
    return 0;
}

int run_report(const ModelArgs& margs, const std::string& hyp_text,
               const std::string& levels_text, const std::string& svg_path,
               const OutputArgs& out) {
    const auto summary = resolve_summary(margs);
    std::vector<Hypothesis> hyps;
    if (!hyp_text.empty()) hyps = parse_hypotheses(hyp_text);
    std::vector<double> levels = parse_number_list(levels_text, "level");
    if (levels.empty()) levels = {0.75, 0.95, 0.99};
    const auto bundle = build_report(summary, hyps, levels);

    if (!svg_path.empty()) {
        PlotSpec spec;
        spec.measure = Measure::p;
        spec.reference_lines = {0.25, 0.05, 0.01};
        spec.band = compatibility_interval(bundle.model, summary.level);
        spec.x_label = summary.scale == Scale::ratio ? "ratio" : "difference";
        write_path(svg_path, out.force, emit_plot(bundle.curve_sample, spec, bundle.provenance));
    }

    const auto fmt = out.format == "markdown" ? TableFormat::markdown : TableFormat::json;
    write_output(out, fmt == TableFormat::markdown ? emit_report_markdown(bundle)
                                                   : emit_report_json(bundle));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compatibility and surprisal analysis of reported study summaries"};
    app.require_subcommand(1);

    // convert
    auto* conv = app.add_subcommand("convert", "convert p values to s/MLR/deviance");
    std::vector<double> conv_ps;
    std::string conv_base = "bits";
    OutputArgs conv_out;
    conv->add_option("--p", conv_ps, "p value (repeatable)")->required();
    conv->add_option("--base", conv_base, "bits|nats (default bits)");
    add_output_options(conv, conv_out, false);

    // stable
    auto* stab = app.add_subcommand("stable", "emit the reference p/s/MLR/deviance table");
    std::vector<double> stab_extra;
    OutputArgs stab_out;
    stab->add_option("--p", stab_extra, "extra p value to append (repeatable)");
    add_output_options(stab, stab_out);

    // table
    auto* tab = app.add_subcommand("table", "compatibility measures for a hypothesis list");
    ModelArgs tab_model;
    std::string tab_hyps;
    OutputArgs tab_out;
    add_model_options(tab, tab_model);
    tab->add_option("--hypotheses", tab_hyps,
                    "comma list; point values, <=v, >=v, or a..b intervals")->required();
    add_output_options(tab, tab_out);

    // interval
    auto* intv = app.add_subcommand("interval", "multi-level compatibility/likelihood intervals");
    ModelArgs intv_model;
    std::string intv_levels = "0.75,0.95,0.99";
    std::vector<double> intv_cutoffs;
    OutputArgs intv_out;
    add_model_options(intv, intv_model);
    intv->add_option("--levels", intv_levels, "comma list of percentile levels");
    intv->add_option("--mlr-cutoff", intv_cutoffs, "likelihood-interval cutoff (repeatable)");
    add_output_options(intv, intv_out);

    // curve
    auto* cur = app.add_subcommand("curve", "sample the compatibility curve (CSV or SVG)");
    ModelArgs cur_model;
    std::string cur_measure = "p", cur_refs, cur_band, cur_svg;
    double cur_lo = 0.0, cur_hi = 0.0;
    int cur_count = 0;
    OutputArgs cur_out;
    add_model_options(cur, cur_model);
    cur->add_option("--measure", cur_measure, "p|s_bits|rel_likelihood|deviance (default p)");
    cur->add_option("--grid-lo", cur_lo, "grid lower bound (natural scale)");
    cur->add_option("--grid-hi", cur_hi, "grid upper bound (natural scale)");
    cur->add_option("--grid-count", cur_count, "grid node count (default 401)");
    cur->add_option("--ref", cur_refs, "comma list of reference lines in measure units");
    cur->add_option("--band-level", cur_band, "shade the compatibility interval at this level");
    cur->add_option("--svg", cur_svg, "emit an SVG plot to this path");
    add_output_options(cur, cur_out);

    // combine
    auto* comb = app.add_subcommand("combine", "combine evidence across independent studies");
    std::vector<double> comb_ps;
    std::string comb_input, comb_sided = "two";
    bool comb_indep = false, comb_cal = false;
    int comb_k = 1;
    std::size_t comb_sims = 100000;
    std::uint64_t comb_seed = 0;
    OutputArgs comb_out;
    comb->add_option("--p", comb_ps, "per-study p value (repeatable)");
    comb->add_option("--input", comb_input, "p-value file (columns label,p)");
    comb->add_flag("--independence-asserted", comb_indep,
                   "record that the studies are asserted independent");
    comb->add_option("--sided", comb_sided, "one|two: sidedness of the input p values");
    comb->add_flag("--calibrate", comb_cal, "run a null calibration instead of combining");
    comb->add_option("--k", comb_k, "calibration: studies per simulation");
    comb->add_option("--sims", comb_sims, "calibration: simulation count (default 100000)");
    comb->add_option("--seed", comb_seed, "calibration: RNG seed");
    add_output_options(comb, comb_out, false);

    // report
    auto* rep = app.add_subcommand("report", "full report bundle (JSON or Markdown)");
    ModelArgs rep_model;
    std::string rep_hyps, rep_levels = "0.75,0.95,0.99", rep_svg;
    OutputArgs rep_out;
    rep_out.format = "json";
    add_model_options(rep, rep_model);
    rep->add_option("--hypotheses", rep_hyps, "hypothesis list (default: null and point estimate)");
    rep->add_option("--levels", rep_levels, "interval ladder levels");
    rep->add_option("--svg", rep_svg, "also emit a p-curve SVG to this path");
    add_output_options(rep, rep_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (conv->parsed()) return run_convert(conv_ps, conv_base, conv_out);
        if (stab->parsed()) return run_stable(stab_extra, stab_out);
        if (tab->parsed()) return run_table(tab_model, tab_hyps, tab_out);
        if (intv->parsed()) return run_interval(intv_model, intv_levels, intv_cutoffs, intv_out);
        if (cur->parsed())
            return run_curve(cur_model, cur_measure, cur_lo, cur_hi, cur_count, cur_refs,
                             cur_band, cur_svg, cur_out);
        if (comb->parsed())
            return run_combine(comb_ps, comb_input, comb_indep, comb_sided, comb_cal, comb_k,
                               comb_sims, comb_seed, comb_out);
        if (rep->parsed()) return run_report(rep_model, rep_hyps, rep_levels, rep_svg, rep_out);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const saturation_error& e) {
        std::cerr << "saturation error: " << e.what() << "\n";
        return 3;
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
