#pragma once

#include <string>

#include "symgrid/ast.hpp"
#include "symgrid/expr.hpp"

namespace symgrid {

/// Shortest decimal spelling that reads back to the same double.
std::string format_number(double x);

/// Canonical text of an expression with minimal parentheses. Re-parsing the output
/// yields a structurally identical tree for any parsed expression.
std::string print_expr(const Expr& e);

std::string print_attributes(const AttributeList& attrs);
std::string print_assign_target(const AssignTarget& t);

/// Canonical model text. Deterministic; print(parse(print(doc))) == print(doc).
std::string print_document(const ModelDocument& doc);

}  // namespace symgrid
