#include "symgrid/differentiate.hpp"

#include <cmath>

#include "symgrid/env.hpp"
#include "symgrid/error.hpp"
#include "symgrid/evaluate.hpp"

namespace symgrid {

namespace {

bool numeric_constant(const Expr& e) {
    return is_constant(e) && e->value.is_numeric() && e->name.empty();
}

bool foldable(const Expr& e) { return is_constant(e) && e->value.is_numeric(); }

// Folds a node whose arguments are all numeric constants.
Expr fold(const Expr& e) {
    static const Env empty;
    try {
        Value v = evaluate(e, empty);
        if (!std::isfinite(v.z.real()) || !std::isfinite(v.z.imag())) return e;
        return make_constant(v);
    } catch (const EvalError&) {
        return e;
    }
}

bool is_minus_one(const Expr& e) {
    return numeric_constant(e) && e->value.z == Complex{-1.0, 0.0};
}

bool is_non_holomorphic(Function f) { return f == Function::Abs || f == Function::Real || f == Function::Imag; }

}  // namespace

Expr constant(double x) { return make_constant(Value::real(x)); }
Expr constant(Complex z) { return make_constant(Value::complex(z)); }

Expr add(Expr a, Expr b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (foldable(a) && foldable(b)) return fold(make_binary(NodeKind::Add, a, b));
    return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return neg(std::move(b));
    if (foldable(a) && foldable(b)) return fold(make_binary(NodeKind::Subtract, a, b));
    return make_binary(NodeKind::Subtract, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
    if (is_zero(a) || is_zero(b)) return constant(0.0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    if (is_minus_one(a)) return neg(std::move(b));
    if (is_minus_one(b)) return neg(std::move(a));
    if (foldable(a) && foldable(b)) return fold(make_binary(NodeKind::Multiply, a, b));
    return make_binary(NodeKind::Multiply, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
    if (is_one(b)) return a;
    if (is_zero(a) && !is_zero(b)) return constant(0.0);
    if (foldable(a) && foldable(b) && !is_zero(b)) return fold(make_binary(NodeKind::Divide, a, b));
    return make_binary(NodeKind::Divide, std::move(a), std::move(b));
}

Expr pow(Expr a, Expr b) {
    if (is_zero(b)) return constant(1.0);
    if (is_one(b)) return a;
    if (is_one(a)) return constant(1.0);
    if (foldable(a) && foldable(b)) return fold(make_binary(NodeKind::Power, a, b));
    return make_binary(NodeKind::Power, std::move(a), std::move(b));
}

Expr neg(Expr a) {
    if (a->kind == NodeKind::Negate) return a->args[0];
    if (numeric_constant(a)) return fold(make_negate(a));
    return make_negate(std::move(a));
}

Expr call(Function f, std::vector<Expr> args) {
    bool all_constant = f != Function::Rnd;
    for (const auto& a : args) all_constant = all_constant && foldable(a);
    Expr e = make_call(f, std::move(args));
    return all_constant ? fold(e) : e;
}

Expr simplify(const Expr& e) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Identifier: return e;
        case NodeKind::Negate: return neg(simplify(n.args[0]));
        case NodeKind::Add: return add(simplify(n.args[0]), simplify(n.args[1]));
        case NodeKind::Subtract: return sub(simplify(n.args[0]), simplify(n.args[1]));
        case NodeKind::Multiply: return mul(simplify(n.args[0]), simplify(n.args[1]));
        case NodeKind::Divide: return div(simplify(n.args[0]), simplify(n.args[1]));
        case NodeKind::Power: return pow(simplify(n.args[0]), simplify(n.args[1]));
        case NodeKind::Conjugate: {
            Expr a = simplify(n.args[0]);
            return foldable(a) ? fold(make_conj(a)) : make_conj(a);
        }
        case NodeKind::Call: {
            if (n.function == Function::Rnd) return e;
            std::vector<Expr> args;
            for (const auto& a : n.args) args.push_back(simplify(a));
            return call(n.function, std::move(args));
        }
        default: {
            return make_binary(n.kind, simplify(n.args[0]), simplify(n.args[1]));
        }
    }
}

namespace {

// conj(e) pushed to the atoms; `e` itself is assumed already normalized.
Expr conj_of(const Expr& e, const RealOracle& is_real) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Constant:
            if (n.value.type == ValueType::Complex && n.value.z.imag() != 0.0)
                return make_constant(Value::complex(std::conj(n.value.z)));
            return e;
        case NodeKind::Identifier: return is_real(n.name) ? e : make_conj(e);
        case NodeKind::Conjugate: return n.args[0];
        case NodeKind::Negate: return make_negate(conj_of(n.args[0], is_real));
        case NodeKind::Call:
            if (is_non_holomorphic(n.function) || !function_info(n.function).smooth) return e;
            return make_call(n.function, {conj_of(n.args[0], is_real)});
        default:
            return make_binary(n.kind, conj_of(n.args[0], is_real), conj_of(n.args[1], is_real));
    }
}

}  // namespace

Expr normalize_conj(const Expr& e, const RealOracle& is_real) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Identifier: return e;
        case NodeKind::Conjugate: return conj_of(normalize_conj(n.args[0], is_real), is_real);
        case NodeKind::Negate: return make_negate(normalize_conj(n.args[0], is_real));
        case NodeKind::Call: {
            if (n.function == Function::Rnd) return e;
            std::vector<Expr> args;
            for (const auto& a : n.args) args.push_back(normalize_conj(a, is_real));
            return make_call(n.function, std::move(args));
        }
        default:
            return make_binary(n.kind, normalize_conj(n.args[0], is_real), normalize_conj(n.args[1], is_real));
    }
}

bool depends_on(const Expr& e, std::string_view name) { return references(e, name); }

namespace {

[[noreturn]] void non_smooth(Function f) {
    throw EvalError("cannot differentiate " + std::string(function_info(f).name) +
                    "(); it may only appear in assignments");
}

// Derivative of a function call f(u) by the chain rule, given u and du.
Expr chain(Function f, const Expr& u, const Expr& du) {
    if (is_zero(du)) return constant(0.0);
    Expr outer;
    switch (f) {
        case Function::Sin: outer = call(Function::Cos, {u}); break;
        case Function::Cos: outer = neg(call(Function::Sin, {u})); break;
        case Function::Tan: outer = div(constant(1.0), pow(call(Function::Cos, {u}), constant(2.0))); break;
        case Function::Asin:
            outer = div(constant(1.0), call(Function::Sqrt, {sub(constant(1.0), pow(u, constant(2.0)))}));
            break;
        case Function::Acos:
            outer = neg(div(constant(1.0), call(Function::Sqrt, {sub(constant(1.0), pow(u, constant(2.0)))})));
            break;
        case Function::Atan: outer = div(constant(1.0), add(constant(1.0), pow(u, constant(2.0)))); break;
        case Function::Sqrt: outer = div(constant(0.5), call(Function::Sqrt, {u})); break;
        case Function::Exp: outer = call(Function::Exp, {u}); break;
        case Function::Log: outer = div(constant(1.0), u); break;
        default: non_smooth(f);
    }
    return mul(outer, du);
}

Expr diff_power(const Expr& e, const Expr& du, const Expr& dw) {
    const Expr& u = e->args[0];
    const Expr& w = e->args[1];
    if (is_zero(dw)) {
        if (is_zero(du)) return constant(0.0);
        return mul(mul(w, pow(u, sub(w, constant(1.0)))), du);
    }
    Expr log_u = (is_constant(u) && u->name == "e") ? constant(1.0) : call(Function::Log, {u});
    if (is_zero(du)) return mul(mul(e, log_u), dw);
    return mul(e, add(mul(dw, log_u), div(mul(w, du), u)));
}

template <class D>
Expr diff_arith(const Expr& e, D&& d) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Negate: return neg(d(n.args[0]));
        case NodeKind::Add: return add(d(n.args[0]), d(n.args[1]));
        case NodeKind::Subtract: return sub(d(n.args[0]), d(n.args[1]));
        case NodeKind::Multiply: {
            Expr da = d(n.args[0]);
            Expr db = d(n.args[1]);
            return add(mul(da, n.args[1]), mul(n.args[0], db));
        }
        case NodeKind::Divide: {
            Expr da = d(n.args[0]);
            Expr db = d(n.args[1]);
            if (is_zero(db)) return div(da, n.args[1]);
            return div(sub(mul(da, n.args[1]), mul(n.args[0], db)), pow(n.args[1], constant(2.0)));
        }
        case NodeKind::Power: return diff_power(e, d(n.args[0]), d(n.args[1]));
        default: break;
    }
    throw EvalError("cannot differentiate a comparison");
}

}  // namespace

Expr diff_real(const Expr& e, std::string_view var) {
    if (!depends_on(e, var)) return constant(0.0);
    const Node& n = *e;
    auto d = [&](const Expr& x) { return diff_real(x, var); };
    switch (n.kind) {
        case NodeKind::Identifier: return constant(1.0);
        case NodeKind::Conjugate: return d(n.args[0]);
        case NodeKind::Call: {
            const Expr& u = n.args[0];
            switch (n.function) {
                case Function::Abs: return mul(call(Function::Sign, {u}), d(u));
                case Function::Real: return d(u);
                case Function::Imag: return constant(0.0);
                case Function::Round:
                case Function::Disc:
                case Function::Rnd:
                case Function::Sign: non_smooth(n.function);
                default: return chain(n.function, u, d(u));
            }
        }
        default: return diff_arith(e, d);
    }
}

bool occurs_wirtinger(const Expr& e, std::string_view var, bool wrt_conj) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Constant: return false;
        case NodeKind::Identifier: return !wrt_conj && n.name == var;
        case NodeKind::Conjugate: return wrt_conj && is_identifier(n.args[0], var);
        case NodeKind::Call:
            if (n.function == Function::Rnd) return false;
            if (is_non_holomorphic(n.function)) return depends_on(e, var);
            break;
        default: break;
    }
    for (const auto& a : n.args)
        if (occurs_wirtinger(a, var, wrt_conj)) return true;
    return false;
}

Expr diff_wirtinger(const Expr& e, std::string_view var, bool wrt_conj, const RealOracle& is_real) {
    if (!occurs_wirtinger(e, var, wrt_conj)) return constant(0.0);
    const Node& n = *e;
    auto d = [&](const Expr& x) { return diff_wirtinger(x, var, wrt_conj, is_real); };
    switch (n.kind) {
        case NodeKind::Identifier:
        case NodeKind::Conjugate: return constant(1.0);
        case NodeKind::Call: {
            const Expr& u = n.args[0];
            if (is_non_holomorphic(n.function)) {
                Expr cu = conj_of(u, is_real);
                Expr du = d(u);
                Expr dcu = d(cu);
                switch (n.function) {
                    case Function::Abs:
                        return div(add(mul(cu, du), mul(u, dcu)), mul(constant(2.0), e));
                    case Function::Real: return div(add(du, dcu), constant(2.0));
                    default: return div(sub(du, dcu), constant(Complex{0.0, 2.0}));
                }
            }
            if (!function_info(n.function).smooth) non_smooth(n.function);
            return chain(n.function, u, d(u));
        }
        default: return diff_arith(e, d);
    }
}

}  // namespace symgrid
