#pragma once

#include <filesystem>
#include <string_view>

#include "symgrid/ast.hpp"
#include "symgrid/expr.hpp"

namespace symgrid {

/// Parses a single expression (e.g. `-v_3^2*aY33*sin(θ_33)`). Throws LexError/ParseError.
Expr parse_expression(std::string_view text);

/// Parses a complete model file. Throws LexError/ParseError on the first syntax error;
/// semantic checks are left to validate_document.
ModelDocument parse_model(std::string_view source);

/// Reads and parses a file. Throws std::runtime_error if the file cannot be read.
ModelDocument parse_model_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace symgrid
