#include "symgrid/error.hpp"

#include <algorithm>

namespace symgrid {

std::string to_string(const SourceLoc& loc) {
    return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
    std::string out = file.empty() ? std::string{} : file + ":";
    out += to_string(d.loc) + ": ";
    out += d.severity == Severity::Error ? "error: " : "warning: ";
    out += d.message;
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

ModelError::ModelError(SourceLoc loc, const std::string& message)
    : std::runtime_error(to_string(loc) + ": " + message), loc_(loc), bare_(message) {}

}  // namespace symgrid
