#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "symgrid/value.hpp"

namespace symgrid {

enum class NodeKind {
    Constant,
    Identifier,
    Negate,
    Add,
    Subtract,
    Multiply,
    Divide,
    Power,
    Less,
    LessEqual,
    Greater,
    GreaterEqual,
    Call,
    Conjugate,
};

enum class Function { Sin, Cos, Tan, Asin, Acos, Atan, Sqrt, Exp, Log, Abs, Real, Imag, Round, Disc, Rnd, Sign };

struct FunctionInfo {
    Function function;
    std::string_view name;
    int arity;
    bool smooth;  // symbolically differentiable
};

const FunctionInfo& function_info(Function f);
std::optional<Function> find_function(std::string_view name);
/// Built-in function names plus `conj`.
bool is_builtin_function(std::string_view name);
bool is_builtin_constant(std::string_view name);

bool is_comparison(NodeKind kind);
bool is_binary(NodeKind kind);

struct Node;

/// Immutable, shared expression tree. Equality is structural.
class Expr {
  public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node& operator*() const { return *node_; }
    const Node* operator->() const { return node_.get(); }
    explicit operator bool() const { return static_cast<bool>(node_); }
    const Node* get() const { return node_.get(); }

    friend bool operator==(const Expr& a, const Expr& b);

  private:
    std::shared_ptr<const Node> node_;
};

struct Node {
    NodeKind kind = NodeKind::Constant;
    Value value;           // Constant
    std::string name;      // Identifier, or symbolic constant name (`e`, `pi`)
    Function function{};   // Call
    std::vector<Expr> args;
};

// Raw constructors: build exactly the requested node, no simplification.
Expr make_constant(Value v);
Expr make_named_constant(std::string_view name);  // `e` or `pi`
Expr make_identifier(std::string name);
Expr make_negate(Expr operand);
Expr make_binary(NodeKind kind, Expr lhs, Expr rhs);
Expr make_call(Function f, std::vector<Expr> args);
Expr make_conj(Expr operand);

bool is_constant(const Expr& e);
bool is_zero(const Expr& e);
bool is_one(const Expr& e);
bool is_identifier(const Expr& e, std::string_view name);

/// Names of all identifiers (excluding rnd() distribution arguments).
std::set<std::string> collect_identifiers(const Expr& e);
/// True if identifier `name` occurs anywhere in `e`.
bool references(const Expr& e, std::string_view name);

}  // namespace symgrid
