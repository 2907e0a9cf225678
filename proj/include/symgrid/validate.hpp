#pragma once

#include <vector>

#include "symgrid/ast.hpp"
#include "symgrid/error.hpp"

namespace symgrid {

/// Semantic checks over a parsed document (and its submodels). All problems are
/// collected; nothing throws. Warnings do not prevent a run.
std::vector<Diagnostic> validate_document(const ModelDocument& doc);

/// Number of equations an equation-mode statement list contributes, or -1 if the arms
/// of some conditional disagree.
int count_equations(const std::vector<Statement>& statements);

}  // namespace symgrid
