#include "report.hpp"

#include <cstdio>

namespace ow2d_cli {

namespace {

const char* method_name(int method) {
    switch (method) {
    case OW2D_SUP_SYMBOLIC_GRID: return "symbolic-grid";
    case OW2D_SUP_NUMERIC_GRID: return "numeric-grid";
    case OW2D_SUP_USER_OVERRIDE: return "user-override";
    }
    return "?";
}

void append_escaped(std::string& out, const std::string& text) {
    out += '"';
    for (char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

void append_quad4(std::string& out, const double q[4]) {
    out += '[';
    for (int i = 0; i < 4; ++i) {
        if (i) out += ", ";
        out += format_number(q[i]);
    }
    out += ']';
}

// key_indent is the indentation of the "tolerances" key line itself.
void append_tolerances(std::string& out, const ow2d_quad_config& cfg,
                       const std::string& key_indent) {
    out += "{\n";
    out += key_indent + "  \"abs_tol\": " + format_number(cfg.abs_tol) + ",\n";
    out += key_indent + "  \"rel_tol\": " + format_number(cfg.rel_tol) + ",\n";
    out += key_indent + "  \"max_depth\": " + std::to_string(cfg.max_depth) + ",\n";
    out += key_indent + "  \"min_cell_width\": " + format_number(cfg.min_cell_width) + "\n";
    out += key_indent + "}";
}

void append_optional(std::string& out, const std::optional<double>& v) {
    if (v)
        out += format_number(*v);
    else
        out += "null";
}

// The common body shared by single-report and sweep emission. `indent` is
// the prefix of every line inside the object.
void append_report_object(std::string& out, const ReportMeta& meta,
                          const ow2d_bound_report& r, const char* indent) {
    auto line = [&](const char* key, const std::string& value, bool last = false) {
        out += indent;
        out += "  \"";
        out += key;
        out += "\": ";
        out += value;
        out += last ? "\n" : ",\n";
    };

    out += "{\n";
    line("schema_version", "1");
    {
        std::string v;
        append_escaped(v, meta.command);
        line("command", v);
    }
    {
        std::string v;
        if (meta.function)
            append_escaped(v, *meta.function);
        else
            v = "null";
        line("function", v);
    }
    {
        std::string v;
        append_escaped(v, meta.weight);
        line("weight", v);
    }
    {
        std::string v;
        append_quad4(v, meta.rect);
        line("rect", v);
    }
    {
        std::string v;
        append_quad4(v, meta.subrect);
        line("subrect", v);
    }
    line("point", "[" + format_number(r.x) + ", " + format_number(r.y) + "]");
    line("m_alpha", format_number(r.m_alpha));
    line("m_beta", format_number(r.m_beta));
    line("A", format_number(r.big_a));
    line("B", format_number(r.big_b));
    line("sup_norm", format_number(r.sup_norm));
    {
        std::string v;
        append_escaped(v, method_name(r.sup_norm_method));
        line("sup_norm_method", v);
    }
    line("defect", format_number(r.defect));
    line("bound", format_number(r.bound));
    line("ratio", format_number(r.ratio));
    line("satisfied", r.satisfied ? "true" : "false");
    {
        std::string v;
        append_optional(v, meta.paper_constant);
        line("paper_constant", v);
    }
    {
        std::string v;
        append_optional(v, meta.derived_constant);
        line("derived_constant", v);
    }
    line("quad_evaluations", std::to_string(r.quad_evaluations));
    {
        std::string v;
        append_tolerances(v, meta.tolerances, std::string(indent) + "  ");
        line("tolerances", v, true);
    }
    out += indent;
    out += "}";
}

} // namespace

std::string format_number(double v) {
    if (v == 0.0) v = 0.0; // collapse negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string write_json_report(const ReportMeta& meta, const ow2d_bound_report& report) {
    std::string out;
    append_report_object(out, meta, report, "");
    out += '\n';
    return out;
}

std::string write_json_sweep(const ReportMeta& meta, std::span<const ow2d_bound_report> reports) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out += "  ";
        append_report_object(out, meta, reports[i], "  ");
        out += (i + 1 < reports.size()) ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

std::string write_json_cubature(const ReportMeta& meta, const ow2d_cubature_result& result,
                                double target_error, long long max_cells) {
    std::string out = "{\n";
    auto line = [&](const char* key, const std::string& value, bool last = false) {
        out += "  \"";
        out += key;
        out += "\": ";
        out += value;
        out += last ? "\n" : ",\n";
    };
    line("schema_version", "1");
    {
        std::string v;
        append_escaped(v, meta.command);
        line("command", v);
    }
    {
        std::string v;
        if (meta.function)
            append_escaped(v, *meta.function);
        else
            v = "null";
        line("function", v);
    }
    {
        std::string v;
        append_escaped(v, meta.weight);
        line("weight", v);
    }
    {
        std::string v;
        append_quad4(v, meta.rect);
        line("rect", v);
    }
    line("value", format_number(result.value));
    line("error_bound", format_number(result.error_bound));
    line("target_error", format_number(target_error));
    line("cells", std::to_string(result.cells));
    line("max_cells", std::to_string(max_cells));
    line("evaluations", std::to_string(result.evaluations));
    line("converged", result.converged ? "true" : "false");
    line("sup_grid_coarsest", std::to_string(result.sup_grid_coarsest));
    {
        std::string v;
        append_tolerances(v, meta.tolerances, "  ");
        line("tolerances", v, true);
    }
    out += "}\n";
    return out;
}

std::string write_csv(std::span<const ow2d_bound_report> reports) {
    std::string out = "x,y,defect,bound,ratio,satisfied\n";
    for (const ow2d_bound_report& r : reports) {
        out += format_number(r.x);
        out += ',';
        out += format_number(r.y);
        out += ',';
        out += format_number(r.defect);
        out += ',';
        out += format_number(r.bound);
        out += ',';
        out += format_number(r.ratio);
        out += ',';
        out += r.satisfied ? "true" : "false";
        out += '\n';
    }
    return out;
}

} // namespace ow2d_cli
