#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "symgrid/expr.hpp"

namespace symgrid {

// Simplifying constructors: constant folding plus 0/1 identities only.
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr a, Expr b);
Expr neg(Expr a);
Expr call(Function f, std::vector<Expr> args);
Expr constant(double x);
Expr constant(Complex z);

/// Rebuilds `e` bottom-up through the simplifying constructors.
Expr simplify(const Expr& e);

/// Answers whether an identifier is real-valued (so that conj(x) == x).
using RealOracle = std::function<bool(std::string_view)>;

/// Pushes conj() down to identifiers. Real identifiers and real constants absorb it;
/// abs/real/imag results are real; holomorphic functions commute with it.
Expr normalize_conj(const Expr& e, const RealOracle& is_real);

/// True if identifier `name` occurs in `e` outside rnd() arguments.
bool depends_on(const Expr& e, std::string_view name);

/// d e / d var for real-valued expressions. abs differentiates to sign.
/// Throws EvalError when a non-smooth function depends on `var`.
Expr diff_real(const Expr& e, std::string_view var);

/// Wirtinger derivative of a conj-normalized expression with respect to `var`
/// (wrt_conj = false) or conj(var) (wrt_conj = true), treating both as independent.
Expr diff_wirtinger(const Expr& e, std::string_view var, bool wrt_conj, const RealOracle& is_real);

/// Whether the Wirtinger partial with respect to (var, wrt_conj) is structurally present:
/// the symbol occurs in the matching form, or anywhere under abs/real/imag.
bool occurs_wirtinger(const Expr& e, std::string_view var, bool wrt_conj);

}  // namespace symgrid
