#include "symgrid/expr.hpp"

#include <array>
#include <numbers>
#include <stdexcept>

namespace symgrid {

namespace {

constexpr std::array<FunctionInfo, 16> kFunctions{{
    {Function::Sin, "sin", 1, true},     {Function::Cos, "cos", 1, true},
    {Function::Tan, "tan", 1, true},     {Function::Asin, "asin", 1, true},
    {Function::Acos, "acos", 1, true},   {Function::Atan, "atan", 1, true},
    {Function::Sqrt, "sqrt", 1, true},   {Function::Exp, "exp", 1, true},
    {Function::Log, "log", 1, true},     {Function::Abs, "abs", 1, true},
    {Function::Real, "real", 1, true},   {Function::Imag, "imag", 1, true},
    {Function::Round, "round", 2, false}, {Function::Disc, "disc", 3, false},
    {Function::Rnd, "rnd", 1, false},    {Function::Sign, "sign", 1, false},
}};

void collect(const Expr& e, std::set<std::string>& out) {
    if (e->kind == NodeKind::Identifier) {
        out.insert(e->name);
        return;
    }
    if (e->kind == NodeKind::Call && e->function == Function::Rnd) return;
    for (const auto& a : e->args) collect(a, out);
}

}  // namespace

const FunctionInfo& function_info(Function f) {
    for (const auto& info : kFunctions)
        if (info.function == f) return info;
    throw std::logic_error("unknown function id");
}

std::optional<Function> find_function(std::string_view name) {
    for (const auto& info : kFunctions)
        if (info.name == name) return info.function;
    return std::nullopt;
}

bool is_builtin_function(std::string_view name) { return name == "conj" || find_function(name).has_value(); }

bool is_builtin_constant(std::string_view name) { return name == "e" || name == "pi"; }

bool is_comparison(NodeKind kind) {
    return kind == NodeKind::Less || kind == NodeKind::LessEqual || kind == NodeKind::Greater ||
           kind == NodeKind::GreaterEqual;
}

bool is_binary(NodeKind kind) {
    switch (kind) {
        case NodeKind::Add:
        case NodeKind::Subtract:
        case NodeKind::Multiply:
        case NodeKind::Divide:
        case NodeKind::Power: return true;
        default: return is_comparison(kind);
    }
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    const Node& x = *a;
    const Node& y = *b;
    return x.kind == y.kind && x.value == y.value && x.name == y.name && x.function == y.function &&
           x.args == y.args;
}

Expr make_constant(Value v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    return Expr(std::move(n));
}

Expr make_named_constant(std::string_view name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->name = std::string(name);
    if (name == "e")
        n->value = Value::real(std::numbers::e);
    else if (name == "pi")
        n->value = Value::real(std::numbers::pi);
    else
        throw std::invalid_argument("unknown constant " + std::string(name));
    return Expr(std::move(n));
}

Expr make_identifier(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Identifier;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr make_negate(Expr operand) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Negate;
    n->args.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr make_binary(NodeKind kind, Expr lhs, Expr rhs) {
    if (!is_binary(kind)) throw std::invalid_argument("make_binary: not a binary operator");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = {std::move(lhs), std::move(rhs)};
    return Expr(std::move(n));
}

Expr make_call(Function f, std::vector<Expr> args) {
    if (static_cast<int>(args.size()) != function_info(f).arity)
        throw std::invalid_argument("make_call: arity mismatch");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->function = f;
    n->args = std::move(args);
    return Expr(std::move(n));
}

Expr make_conj(Expr operand) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Conjugate;
    n->args.push_back(std::move(operand));
    return Expr(std::move(n));
}

bool is_constant(const Expr& e) { return e && e->kind == NodeKind::Constant; }

bool is_zero(const Expr& e) { return is_constant(e) && e->value.is_numeric() && e->value.z == Complex{}; }

bool is_one(const Expr& e) { return is_constant(e) && e->value.is_numeric() && e->value.z == Complex{1.0, 0.0}; }

bool is_identifier(const Expr& e, std::string_view name) {
    return e && e->kind == NodeKind::Identifier && e->name == name;
}

std::set<std::string> collect_identifiers(const Expr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

bool references(const Expr& e, std::string_view name) {
    if (e->kind == NodeKind::Identifier) return e->name == name;
    if (e->kind == NodeKind::Call && e->function == Function::Rnd) return false;
    for (const auto& a : e->args)
        if (references(a, name)) return true;
    return false;
}

}  // namespace symgrid
