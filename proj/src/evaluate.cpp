#include "symgrid/evaluate.hpp"

#include <cmath>
#include <numbers>

#include "symgrid/error.hpp"
#include "symgrid/printer.hpp"

namespace symgrid {

namespace {

bool is_complex(const Value& v) { return v.type == ValueType::Complex; }

Value numeric(const Value& v, const char* context) {
    if (v.is_bool()) throw EvalError(std::string("boolean operand in ") + context);
    return v;
}

Value make_result(Complex z, bool complex_typed) {
    return complex_typed ? Value::complex(z) : Value::real(z.real());
}

Complex int_pow(Complex base, long long n) {
    bool invert = n < 0;
    unsigned long long k = static_cast<unsigned long long>(invert ? -n : n);
    Complex result{1.0, 0.0};
    while (k) {
        if (k & 1ULL) result *= base;
        base *= base;
        k >>= 1;
    }
    return invert ? Complex{1.0, 0.0} / result : result;
}

Value power(const Value& a, const Value& b) {
    bool cplx = is_complex(a) || is_complex(b);
    if (!cplx) {
        double x = a.z.real();
        double y = b.z.real();
        if (x == std::numbers::e) return Value::real(std::exp(y));
        return Value::real(std::pow(x, y));
    }
    Complex x = a.z;
    Complex y = b.z;
    if (x == Complex{std::numbers::e, 0.0}) return Value::complex(std::exp(y));
    if (y.imag() == 0.0 && y.real() == std::round(y.real()) && std::abs(y.real()) <= 64.0)
        return Value::complex(int_pow(x, static_cast<long long>(y.real())));
    if (x == Complex{}) return Value::complex(Complex{});
    return Value::complex(std::pow(x, y));
}

double compare_operand(const Value& v) {
    if (v.is_bool()) throw EvalError("boolean operand in comparison");
    if (v.z.imag() != 0.0) throw EvalError("comparison of complex values (use abs() or real())");
    return v.z.real();
}

Value call(Function f, const std::vector<Expr>& args, const Env& env) {
    if (f == Function::Rnd) {
        const std::string& name = args[0]->name;
        auto it = env.distributions.find(name);
        if (it == env.distributions.end()) throw EvalError("unknown distribution '" + name + "'");
        if (!env.rng()) throw EvalError("rnd() requires a random number stream");
        return env.rng()->sample(it->second, env.domain());
    }
    Value a = numeric(evaluate(args[0], env), "function argument");
    bool cplx = is_complex(a);
    Complex z = a.z;
    double x = z.real();
    switch (f) {
        case Function::Sin: return cplx ? Value::complex(std::sin(z)) : Value::real(std::sin(x));
        case Function::Cos: return cplx ? Value::complex(std::cos(z)) : Value::real(std::cos(x));
        case Function::Tan: return cplx ? Value::complex(std::tan(z)) : Value::real(std::tan(x));
        case Function::Asin: return cplx ? Value::complex(std::asin(z)) : Value::real(std::asin(x));
        case Function::Acos: return cplx ? Value::complex(std::acos(z)) : Value::real(std::acos(x));
        case Function::Atan: return cplx ? Value::complex(std::atan(z)) : Value::real(std::atan(x));
        case Function::Sqrt: return cplx ? Value::complex(std::sqrt(z)) : Value::real(std::sqrt(x));
        case Function::Exp: return cplx ? Value::complex(std::exp(z)) : Value::real(std::exp(x));
        case Function::Log: return cplx ? Value::complex(std::log(z)) : Value::real(std::log(x));
        case Function::Abs: return Value::real(cplx ? std::abs(z) : std::fabs(x));
        case Function::Real: return Value::real(x);
        case Function::Imag: return Value::real(z.imag());
        case Function::Sign: {
            double s = a.as_real("sign argument");
            if (s == 0.0) throw EvalError("sign(0) is undefined (derivative of abs at 0)");
            return Value::real(s > 0.0 ? 1.0 : -1.0);
        }
        case Function::Round: {
            double v = a.as_real("round argument");
            double n = numeric(evaluate(args[1], env), "round").as_real("round digits");
            double scale = std::pow(10.0, std::round(n));
            return Value::real(std::round(v * scale) / scale);
        }
        case Function::Disc: {
            double v = a.as_real("disc argument");
            double c = numeric(evaluate(args[1], env), "disc").as_real("disc center");
            double s = numeric(evaluate(args[2], env), "disc").as_real("disc step");
            if (s == 0.0) throw EvalError("disc step must be nonzero");
            return Value::real(c + s * std::round((v - c) / s));
        }
        case Function::Rnd: break;
    }
    throw EvalError("unsupported function");
}

}  // namespace

Value evaluate(const Expr& e, const Env& env) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Constant: return n.value;
        case NodeKind::Identifier: return env.get(n.name);
        case NodeKind::Negate: {
            Value a = numeric(evaluate(n.args[0], env), "negation");
            return make_result(-a.z, is_complex(a));
        }
        case NodeKind::Conjugate: {
            Value a = numeric(evaluate(n.args[0], env), "conj");
            return is_complex(a) ? Value::complex(std::conj(a.z)) : a;
        }
        case NodeKind::Call: return call(n.function, n.args, env);
        case NodeKind::Less:
        case NodeKind::LessEqual:
        case NodeKind::Greater:
        case NodeKind::GreaterEqual: {
            double a = compare_operand(evaluate(n.args[0], env));
            double b = compare_operand(evaluate(n.args[1], env));
            switch (n.kind) {
                case NodeKind::Less: return Value::boolean(a < b);
                case NodeKind::LessEqual: return Value::boolean(a <= b);
                case NodeKind::Greater: return Value::boolean(a > b);
                default: return Value::boolean(a >= b);
            }
        }
        default: break;
    }
    Value a = numeric(evaluate(n.args[0], env), "arithmetic");
    Value b = numeric(evaluate(n.args[1], env), "arithmetic");
    bool cplx = is_complex(a) || is_complex(b);
    switch (n.kind) {
        case NodeKind::Add: return make_result(a.z + b.z, cplx);
        case NodeKind::Subtract: return make_result(a.z - b.z, cplx);
        case NodeKind::Multiply:
            return cplx ? Value::complex(a.z * b.z) : Value::real(a.z.real() * b.z.real());
        case NodeKind::Divide:
            if (b.z == Complex{}) throw EvalError("division by zero in '" + print_expr(e) + "'");
            return cplx ? Value::complex(a.z / b.z) : Value::real(a.z.real() / b.z.real());
        case NodeKind::Power: return power(a, b);
        default: break;
    }
    throw EvalError("unsupported expression node");
}

bool evaluate_guard(const Expr& e, const Env& env) {
    Value v = evaluate(e, env);
    if (!v.is_bool()) throw EvalError("guard '" + print_expr(e) + "' is not boolean");
    return v.z.real() != 0.0;
}

}  // namespace symgrid
