#pragma once

#include "ostrowski2d.h"

#include <optional>
#include <span>
#include <string>

namespace ow2d_cli {

// Everything the emitters need besides the numeric payload. `function` is
// empty for commands that take none (constants); the two closed-form fields
// are only set by the constants command.
struct ReportMeta {
    std::string command;
    std::optional<std::string> function;
    std::string weight;
    double rect[4] = {0, 0, 0, 0};
    double subrect[4] = {0, 0, 0, 0};
    ow2d_quad_config tolerances{};
    std::optional<double> paper_constant;
    std::optional<double> derived_constant;
};

// %.17g with negative zero collapsed to "0".
std::string format_number(double v);

// One JSON object per verification point; fixed key order, LF line endings.
std::string write_json_report(const ReportMeta& meta, const ow2d_bound_report& report);

// JSON array of per-point objects, row-major sweep order.
std::string write_json_sweep(const ReportMeta& meta, std::span<const ow2d_bound_report> reports);

// Cubature result object (value/error_bound/cells/... payload).
std::string write_json_cubature(const ReportMeta& meta, const ow2d_cubature_result& result,
                                double target_error, long long max_cells);

// Header x,y,defect,bound,ratio,satisfied then one row per report.
std::string write_csv(std::span<const ow2d_bound_report> reports);

} // namespace ow2d_cli
