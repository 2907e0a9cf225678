#pragma once

#include "symgrid/env.hpp"
#include "symgrid/expr.hpp"

namespace symgrid {

/// Evaluates `e` against `env`. rnd() draws from env.rng() in the env's domain.
/// Throws EvalError on unbound names, division by zero, complex comparisons,
/// booleans in arithmetic, and sign(0).
Value evaluate(const Expr& e, const Env& env);

/// Evaluates and requires a boolean result.
bool evaluate_guard(const Expr& e, const Env& env);

}  // namespace symgrid
