#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "symgrid/ast.hpp"
#include "symgrid/differentiate.hpp"
#include "symgrid/env.hpp"
#include "symgrid/sparse.hpp"

namespace symgrid {

/// One Jacobian column: a variable, or the conjugate partner of a complex variable.
struct UnknownSlot {
    std::string name;
    bool conjugate = false;
    bool complex = false;  // the variable itself is complex-typed
};

/// Builds the column layout for `variables` (declaration order). In the complex domain
/// each complex variable contributes the interleaved pair (v, conj v).
std::vector<UnknownSlot> layout_unknowns(const std::vector<std::string>& variables, const Env& env);

struct EquationRow {
    Expr lhs;
    std::optional<Expr> rhs;
    Expr residual;                              // conj-normalized lhs - rhs
    std::vector<std::pair<int, Expr>> partials; // column -> symbolic derivative
    std::string text;
    SourceLoc loc;
    AttributeList attrs;
};

struct ConditionalSite;
using SystemItem = std::variant<EquationRow, std::shared_ptr<const ConditionalSite>>;

struct ConditionalArm {
    std::optional<Expr> guard;  // nullopt: else / default
    AttributeList attrs;
    std::vector<SystemItem> body;
};

struct ConditionalSite {
    std::vector<ConditionalArm> arms;
    SourceLoc loc;
};

/// Numeric system at one point: rows are the equations of the active arms.
struct Assembly {
    std::vector<Complex> residual;
    std::vector<Triplet<Complex>> jacobian;
    std::vector<const EquationRow*> rows;
    std::vector<int> arms;  // chosen arm per conditional site, in traversal order
};

/// Symbolically compiled equation set: residuals and sparse partials are derived once.
class EquationSystem {
  public:
    EquationSystem() = default;
    EquationSystem(const std::vector<Statement>& statements, std::vector<UnknownSlot> columns, const Env& env);

    const std::vector<UnknownSlot>& columns() const { return columns_; }
    int column_count() const { return static_cast<int>(columns_.size()); }
    const std::vector<SystemItem>& items() const { return items_; }

    /// Picks active arms against `env` and evaluates residuals and partials.
    /// Throws EvalError (with the equation location) on evaluation failures.
    Assembly assemble(const Env& env) const;

    /// Symbolic structure of every row reachable through any arm (for reporting).
    std::size_t symbolic_nonzeros() const;

  private:
    SystemItem compile(const Statement& st, const Env& env) const;
    EquationRow compile_equation(const EquationStmt& eq, const Env& env) const;

    std::vector<UnknownSlot> columns_;
    std::vector<SystemItem> items_;
    Domain domain_ = Domain::Real;
};

/// Applies `x <- x + sign * delta` to the primary slots in `env`. Conjugate slots are
/// ignored: they always read back as the exact conjugate of their primary.
void apply_step(const std::vector<UnknownSlot>& columns, const std::vector<Complex>& delta, double sign, Env& env);

double inf_norm(const std::vector<Complex>& v);

/// Sparse solve in the arithmetic of `domain` (the real domain drops imaginary parts).
std::vector<Complex> solve_linear(int n, const std::vector<Triplet<Complex>>& a, const std::vector<Complex>& b,
                                  Domain domain);

}  // namespace symgrid
