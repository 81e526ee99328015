#include "ostrowski2d.h"
#include "report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace {

using ow2d_cli::format_number;
using ow2d_cli::ReportMeta;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(std::string message) { throw CliError{2, std::move(message)}; }

// Turns the thread-local error state of a failed library call into a
// CliError, prefixing parse/domain failures with their byte offset.
[[noreturn]] void fail_api(ow2d_status status) {
    std::string msg = ow2d_last_error_message();
    long long offset = ow2d_last_error_offset();
    if (status == OW2D_ERR_PARSE && offset >= 0)
        fail("parse error at offset " + std::to_string(offset) + ": " + msg);
    if (status == OW2D_ERR_EVAL_DOMAIN && offset >= 0)
        fail("evaluation error at offset " + std::to_string(offset) + ": " + msg);
    fail(std::move(msg));
}

void check(ow2d_status status) {
    if (status != OW2D_OK) fail_api(status);
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
}

std::vector<double> parse_reals(const std::string& text, std::size_t n, const char* flag) {
    std::vector<std::string> parts = split_commas(text);
    std::vector<double> values;
    if (parts.size() == n) {
        for (const std::string& raw : parts) {
            std::string piece = trimmed(raw);
            if (piece.empty()) break;
            char* end = nullptr;
            double v = std::strtod(piece.c_str(), &end);
            if (end != piece.c_str() + piece.size() || !std::isfinite(v)) break;
            values.push_back(v);
        }
    }
    if (values.size() != n)
        fail(std::string(flag) + " expects " + std::to_string(n) +
             " comma-separated finite reals, got '" + text + "'");
    return values;
}

std::vector<int> parse_ints(const std::string& text, std::size_t n, const char* flag) {
    std::vector<std::string> parts = split_commas(text);
    std::vector<int> values;
    if (parts.size() == n) {
        for (const std::string& raw : parts) {
            std::string piece = trimmed(raw);
            if (piece.empty()) break;
            char* end = nullptr;
            long v = std::strtol(piece.c_str(), &end, 10);
            if (end != piece.c_str() + piece.size()) break;
            values.push_back(static_cast<int>(v));
        }
    }
    if (values.size() != n)
        fail(std::string(flag) + " expects " + std::to_string(n) +
             " comma-separated integers, got '" + text + "'");
    return values;
}

struct ExprHandle {
    ow2d_expr* p = nullptr;
    ~ExprHandle() { ow2d_expr_free(p); }
};

struct WeightHandle {
    ow2d_weight* p = nullptr;
    ~WeightHandle() { ow2d_weight_free(p); }
};

void parse_function(const std::string& text, ExprHandle& out) {
    static const char* vars[2] = {"t", "s"};
    check(ow2d_expr_parse(text.c_str(), vars, 2, &out.p));
}

// All commands share one weight over the hull of the rectangle's two edges,
// so the same 1-d selector serves both axes.
void make_weight(const std::string& selector, const double rect[4], WeightHandle& out) {
    double lo = std::min(rect[0], rect[2]);
    double hi = std::max(rect[1], rect[3]);
    check(ow2d_weight_create(selector.c_str(), lo, hi, &out.p));
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) fail("cannot open output file '" + path + "'");
    file << payload;
    if (!file) fail("failed writing output file '" + path + "'");
}

// Raw option values as typed on the command line; numeric lists stay strings
// until the owning command parses them.
struct Options {
    std::string function;
    std::string weight;
    std::string rect;
    std::string subrect;
    std::string point;
    std::string grid;
    std::string interval;
    std::string case_name;
    bool midpoint = false;
    double target_error = 1e-6;
    long long max_cells = 500000;
    double abs_tol = 0;
    double rel_tol = 0;
    double sup_norm = 0;
    std::string format = "json";
    std::string out_path;
    std::string config_path;
};

struct RectPair {
    double rect[4];
    double sub[4];
};

RectPair resolve_rects(const Options& o, bool subrect_given) {
    RectPair r{};
    std::vector<double> rv = parse_reals(o.rect, 4, "--rect");
    std::copy(rv.begin(), rv.end(), r.rect);
    if (!(r.rect[0] < r.rect[1]) || !(r.rect[2] < r.rect[3]))
        fail("--rect must satisfy a < b and c < d");
    if (subrect_given) {
        std::vector<double> sv = parse_reals(o.subrect, 4, "--subrect");
        std::copy(sv.begin(), sv.end(), r.sub);
        if (!(r.sub[0] < r.sub[1]) || !(r.sub[2] < r.sub[3]))
            fail("--subrect must have positive width on both axes");
        if (r.sub[0] < r.rect[0] || r.sub[1] > r.rect[1] || r.sub[2] < r.rect[2] ||
            r.sub[3] > r.rect[3])
            fail("--subrect must lie inside --rect");
    } else {
        std::copy(std::begin(r.rect), std::end(r.rect), r.sub);
    }
    return r;
}

ow2d_quad_config resolve_config(const Options& o) {
    ow2d_quad_config cfg = ow2d_quad_config_default();
    cfg.abs_tol = o.abs_tol;
    cfg.rel_tol = o.rel_tol;
    if (!(cfg.abs_tol > 0) || !(cfg.rel_tol > 0))
        fail("--abs-tol and --rel-tol must be positive");
    return cfg;
}

ReportMeta make_meta(const char* command, const Options& o, const RectPair& r,
                     const ow2d_quad_config& cfg, bool with_function) {
    ReportMeta meta;
    meta.command = command;
    if (with_function) meta.function = o.function;
    meta.weight = o.weight;
    std::copy(std::begin(r.rect), std::end(r.rect), meta.rect);
    std::copy(std::begin(r.sub), std::end(r.sub), meta.subrect);
    meta.tolerances = cfg;
    return meta;
}

int run_verify(const CLI::App& cmd, const Options& o) {
    RectPair r = resolve_rects(o, cmd.count("--subrect") > 0);
    ow2d_quad_config cfg = resolve_config(o);

    bool point_given = cmd.count("--point") > 0;
    if (point_given == o.midpoint) fail("verify needs exactly one of --point and --midpoint");
    double pt[2];
    if (o.midpoint) {
        pt[0] = (r.sub[0] + r.sub[1]) / 2;
        pt[1] = (r.sub[2] + r.sub[3]) / 2;
    } else {
        std::vector<double> pv = parse_reals(o.point, 2, "--point");
        pt[0] = pv[0];
        pt[1] = pv[1];
    }

    ExprHandle f;
    parse_function(o.function, f);
    WeightHandle w;
    make_weight(o.weight, r.rect, w);

    bool sup_given = cmd.count("--sup-norm") > 0;
    const double* override_ptr = sup_given ? &o.sup_norm : nullptr;
    ow2d_bound_report report{};
    check(ow2d_verify(f.p, w.p, r.sub, pt, &cfg, override_ptr, &report));

    ReportMeta meta = make_meta("verify", o, r, cfg, true);
    std::string payload = o.format == "csv"
                              ? ow2d_cli::write_csv(std::span<const ow2d_bound_report>(&report, 1))
                              : ow2d_cli::write_json_report(meta, report);
    write_output(o.out_path, payload);
    return report.satisfied ? 0 : 1;
}

int run_sweep(const CLI::App& cmd, const Options& o) {
    RectPair r = resolve_rects(o, cmd.count("--subrect") > 0);
    ow2d_quad_config cfg = resolve_config(o);

    std::vector<int> grid = parse_ints(o.grid, 2, "--grid");
    if (grid[0] < 2 || grid[1] < 2) fail("--grid entries must be at least 2");

    ExprHandle f;
    parse_function(o.function, f);
    WeightHandle w;
    make_weight(o.weight, r.rect, w);

    bool sup_given = cmd.count("--sup-norm") > 0;
    const double* override_ptr = sup_given ? &o.sup_norm : nullptr;
    std::vector<ow2d_bound_report> reports(static_cast<std::size_t>(grid[0]) *
                                           static_cast<std::size_t>(grid[1]));
    check(ow2d_sweep(f.p, w.p, r.sub, grid[0], grid[1], &cfg, override_ptr, reports.data()));

    ReportMeta meta = make_meta("sweep", o, r, cfg, true);
    std::string payload = o.format == "csv" ? ow2d_cli::write_csv(reports)
                                            : ow2d_cli::write_json_sweep(meta, reports);
    write_output(o.out_path, payload);
    bool all_satisfied = std::all_of(reports.begin(), reports.end(),
                                     [](const ow2d_bound_report& rep) { return rep.satisfied; });
    return all_satisfied ? 0 : 1;
}

int run_cubature(const CLI::App& cmd, const Options& o) {
    if (o.format == "csv") fail("csv output is only available for verify and sweep");
    RectPair r = resolve_rects(o, false);
    ow2d_quad_config cfg = resolve_config(o);
    if (!(o.target_error > 0)) fail("--target-error must be positive");
    if (o.max_cells < 1) fail("--max-cells must be at least 1");
    (void)cmd;

    ExprHandle f;
    parse_function(o.function, f);
    WeightHandle w;
    make_weight(o.weight, r.rect, w);

    ow2d_cubature_result result{};
    check(ow2d_cubature(f.p, w.p, r.rect, o.target_error, o.max_cells, &cfg, &result));

    ReportMeta meta = make_meta("cubature", o, r, cfg, true);
    write_output(o.out_path, ow2d_cli::write_json_cubature(meta, result, o.target_error, o.max_cells));
    return result.converged ? 0 : 1;
}

int run_median(const Options& o) {
    std::vector<double> iv = parse_reals(o.interval, 2, "--interval");
    if (!(iv[0] < iv[1])) fail("--interval must satisfy lo < hi");
    ow2d_quad_config cfg = resolve_config(o);

    WeightHandle w;
    check(ow2d_weight_create(o.weight.c_str(), iv[0], iv[1], &w.p));
    double median = 0;
    check(ow2d_weight_median(w.p, iv[0], iv[1], &cfg, &median));

    write_output(o.out_path, format_number(median) + "\n");
    return 0;
}

int run_constants(const CLI::App& cmd, Options& o) {
    if (o.format == "csv") fail("csv output is only available for verify and sweep");
    RectPair r = resolve_rects(o, cmd.count("--subrect") > 0);
    ow2d_quad_config cfg = resolve_config(o);

    int constant_case = 0;
    if (o.case_name == "w1-midpoint")
        constant_case = OW2D_CONST_W1_MIDPOINT;
    else if (o.case_name == "w1-subrect")
        constant_case = OW2D_CONST_W1_SUBRECT;
    else if (o.case_name == "wu-midpoint")
        constant_case = OW2D_CONST_WU_MIDPOINT;
    else
        fail("--case must be one of w1-midpoint, w1-subrect, wu-midpoint");

    ow2d_constant_pair pair{};
    check(ow2d_closed_form_constant(constant_case, r.rect, r.sub, &pair));

    o.weight = constant_case == OW2D_CONST_WU_MIDPOINT ? "linear" : "const";
    WeightHandle w;
    make_weight(o.weight, r.rect, w);

    // The report echoes the moment data behind the recomputed constant: the
    // evaluation point is the full-rectangle midpoint, moments are taken over
    // the active subrectangle, and the unit sup-norm makes bound = constant.
    ow2d_bound_report report{};
    report.x = (r.rect[0] + r.rect[1]) / 2;
    report.y = (r.rect[2] + r.rect[3]) / 2;
    check(ow2d_weight_mass(w.p, r.sub[0], r.sub[1], &cfg, &report.m_alpha));
    check(ow2d_weight_mass(w.p, r.sub[2], r.sub[3], &cfg, &report.m_beta));
    check(ow2d_weight_abs_moment(w.p, r.sub[0], r.sub[1], report.x, &cfg, &report.big_a));
    check(ow2d_weight_abs_moment(w.p, r.sub[2], r.sub[3], report.y, &cfg, &report.big_b));
    report.sup_norm = 1.0;
    report.sup_norm_method = OW2D_SUP_USER_OVERRIDE;
    report.defect = 0.0;
    report.bound = pair.derived_value;
    report.ratio = 0.0;
    report.satisfied = pair.mismatch ? 0 : 1;
    report.quad_converged = 1;
    report.quad_evaluations = 0;

    ReportMeta meta = make_meta("constants", o, r, cfg, false);
    meta.paper_constant = pair.paper_value;
    meta.derived_constant = pair.derived_value;
    write_output(o.out_path, ow2d_cli::write_json_report(meta, report));
    if (pair.mismatch)
        std::cerr << "ow2d: printed constant " << format_number(pair.paper_value)
                  << " disagrees with the recomputed constant "
                  << format_number(pair.derived_value) << "\n";
    return 0;
}

const char* const kConfigKeys[] = {"function", "weight",   "rect",       "subrect",
                                   "point",    "midpoint", "grid",       "interval",
                                   "case",     "target-error", "max-cells", "abs-tol",
                                   "rel-tol",  "sup-norm", "format",     "out"};

bool known_config_key(const std::string& key) {
    for (const char* k : kConfigKeys)
        if (key == k) return true;
    return false;
}

std::vector<std::string> load_config_tokens(const std::string& path) {
    std::ifstream file(path);
    if (!file) fail("config: cannot open '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        std::string entry = trimmed(line);
        if (entry.empty() || entry[0] == '#') continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            fail("config: line " + std::to_string(line_no) + " is not key=value");
        std::string key = trimmed(entry.substr(0, eq));
        std::string value = trimmed(entry.substr(eq + 1));
        if (key == "config") fail("config: files may not set 'config'");
        if (!known_config_key(key))
            fail("config: unknown key '" + key + "' on line " + std::to_string(line_no));
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

const char* const kCommands[] = {"verify", "sweep", "cubature", "median", "constants"};

// Splices config-file tokens right after the subcommand token, so explicit
// flags (parsed take-last) override the file.
void expand_config(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return;

    std::size_t command_at = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        for (const char* name : kCommands)
            if (args[i] == name) {
                command_at = i;
                break;
            }
        if (command_at != args.size()) break;
    }
    if (command_at == args.size()) fail("--config requires a command");

    std::vector<std::string> tokens = load_config_tokens(path);
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(command_at) + 1, tokens.begin(),
                tokens.end());
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        expand_config(args);
    } catch (const CliError& e) {
        std::cerr << "ow2d: " << e.message << "\n";
        return e.code;
    }

    Options o;
    ow2d_quad_config defaults = ow2d_quad_config_default();
    o.abs_tol = defaults.abs_tol;
    o.rel_tol = defaults.rel_tol;

    CLI::App app{"Weighted two-variable Ostrowski bounds: verification, sweeps and certified "
                 "cubature."};
    app.name("ow2d");
    app.set_version_flag("--version", ow2d_version());
    app.require_subcommand(1);

    auto take_last = [](CLI::App* cmd) {
        cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--abs-tol", o.abs_tol, "Quadrature absolute tolerance")
            ->capture_default_str();
        cmd->add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance")
            ->capture_default_str();
        cmd->add_option("--out", o.out_path, "Write the report to this file instead of stdout");
        cmd->add_option("--config", o.config_path,
                        "key=value file of these options; explicit flags override it");
    };
    auto add_problem = [&](CLI::App* cmd) {
        cmd->add_option("--function", o.function, "Integrand f over variables t, s")->required();
        cmd->add_option("--weight", o.weight,
                        "Weight selector: const, linear or expr:<text over u>")
            ->required();
        cmd->add_option("--rect", o.rect, "Rectangle a,b,c,d")->required();
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", o.format, "Report format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };

    CLI::App* verify = app.add_subcommand("verify", "Defect and bound of f at one point");
    take_last(verify);
    add_problem(verify);
    verify->add_option("--subrect", o.subrect, "Active subrectangle (default: the rectangle)");
    verify->add_option("--point", o.point, "Evaluation point x,y");
    verify->add_flag("--midpoint", o.midpoint, "Evaluate at the subrectangle midpoint");
    verify->add_option("--sup-norm", o.sup_norm, "Override the mixed-partial sup-norm estimate");
    add_format(verify);
    add_common(verify);

    CLI::App* sweep = app.add_subcommand("sweep", "Verify on an interior lattice of points");
    take_last(sweep);
    add_problem(sweep);
    sweep->add_option("--subrect", o.subrect, "Active subrectangle (default: the rectangle)");
    sweep->add_option("--grid", o.grid, "Lattice size nx,ny (each at least 2)")->required();
    sweep->add_option("--sup-norm", o.sup_norm, "Override the mixed-partial sup-norm estimate");
    add_format(sweep);
    add_common(sweep);

    CLI::App* cubature = app.add_subcommand(
        "cubature", "Adaptive double integral of w(t)w(s)f(t,s) with a certified error bound");
    take_last(cubature);
    add_problem(cubature);
    cubature->add_option("--target-error", o.target_error, "Certified error bound to reach")
        ->required();
    cubature->add_option("--max-cells", o.max_cells, "Subdivision budget")->capture_default_str();
    add_format(cubature);
    add_common(cubature);

    CLI::App* median = app.add_subcommand("median", "Weighted median of a weight on an interval");
    take_last(median);
    median->add_option("--weight", o.weight,
                       "Weight selector: const, linear or expr:<text over u>")
        ->required();
    median->add_option("--interval", o.interval, "Interval lo,hi")->required();
    add_common(median);

    CLI::App* constants = app.add_subcommand(
        "constants", "Printed closed-form bound constant next to the recomputed one");
    take_last(constants);
    constants->add_option("--case", o.case_name, "w1-midpoint, w1-subrect or wu-midpoint")
        ->required();
    constants->add_option("--rect", o.rect, "Rectangle a,b,c,d")->required();
    constants->add_option("--subrect", o.subrect, "Subrectangle for w1-subrect");
    add_format(constants);
    add_common(constants);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
        std::cerr << "ow2d: " << e.what() << "\n";
        return 2;
    }

    try {
        if (verify->parsed()) return run_verify(*verify, o);
        if (sweep->parsed()) return run_sweep(*sweep, o);
        if (cubature->parsed()) return run_cubature(*cubature, o);
        if (median->parsed()) return run_median(o);
        if (constants->parsed()) return run_constants(*constants, o);
    } catch (const CliError& e) {
        std::cerr << "ow2d: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "ow2d: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
