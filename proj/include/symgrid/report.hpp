#pragma once

#include <filesystem>
#include <string>

#include "symgrid/engine.hpp"

namespace symgrid {

/// Renders a run at the given detail level. Deterministic for a given report.
std::string format_report(const RunReport& run, ReportLevel level);

/// Per-measurement table: equation, weight, residual, weighted squared residual, J(x).
std::string format_residual_table(const EstimateResult& result);

/// Repeat trace as CSV: one row per repeat pass. Complex outputs get _re, _im, _abs columns.
std::string format_trace_csv(const RunReport& run);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace symgrid
