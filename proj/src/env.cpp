#include "symgrid/env.hpp"

#include <cmath>
#include <optional>

#include "symgrid/error.hpp"

namespace symgrid {

Value Rng::sample(const Distribution& d, Domain context) {
    if (d.dev < 0.0) throw EvalError("distribution '" + d.name + "' has a negative dev");
    double re = d.mean + d.dev * standard_normal();
    if (context == Domain::Real) return Value::real(re);
    double im = d.mean + d.dev * standard_normal();
    return Value::complex({re, im});
}

bool Env::contains(std::string_view name) const { return find(name) != nullptr; }

const Env::Binding* Env::find(std::string_view name) const {
    auto it = bindings_.find(std::string(name));
    return it == bindings_.end() ? nullptr : &it->second;
}

const Value& Env::get(std::string_view name) const {
    const Binding* b = find(name);
    if (!b) throw EvalError("unbound identifier '" + std::string(name) + "'");
    return b->value;
}

void Env::define(const std::string& name, Value value, ValueType type, bool variable) {
    auto [it, inserted] = bindings_.try_emplace(name);
    if (inserted) order_.push_back(name);
    it->second = Binding{coerce(type, value, name), type, variable};
}

void Env::assign(std::string_view name, Value value) {
    auto it = bindings_.find(std::string(name));
    if (it == bindings_.end()) throw EvalError("assignment to undeclared name '" + std::string(name) + "'");
    it->second.value = coerce(it->second.type, value, name);
}

void Env::assign_component(std::string_view name, bool imag_part, double x) {
    auto it = bindings_.find(std::string(name));
    if (it == bindings_.end()) throw EvalError("assignment to undeclared name '" + std::string(name) + "'");
    Binding& b = it->second;
    if (b.type != ValueType::Complex) {
        // A real slot has an implicit zero imaginary part; only `.real` is meaningful.
        if (imag_part) throw EvalError("'.imag' selector on real-typed '" + std::string(name) + "'");
        b.value = coerce(b.type, Value::real(x), name);
        return;
    }
    Complex z = b.value.z;
    b.value.z = imag_part ? Complex{z.real(), x} : Complex{x, z.imag()};
}

Value coerce(ValueType t, const Value& v, std::string_view name) {
    auto mismatch = [&](const char* what) {
        return EvalError("cannot store " + std::string(what) + " in " + to_string(t) + " '" + std::string(name) + "'");
    };
    switch (t) {
        case ValueType::Bool:
            if (!v.is_bool()) throw mismatch("a number");
            return v;
        case ValueType::Complex:
            if (v.is_bool()) throw mismatch("a boolean");
            return Value::complex(v.z);
        case ValueType::Real:
            if (v.is_bool()) throw mismatch("a boolean");
            if (v.z.imag() != 0.0) throw mismatch("a complex value");
            return Value::real(v.z.real());
        case ValueType::Int:
            if (v.is_bool()) throw mismatch("a boolean");
            if (v.z.imag() != 0.0) throw mismatch("a complex value");
            return Value::integer(std::round(v.z.real()));
    }
    return v;
}

std::optional<ValueType> parse_value_type(std::string_view text) {
    if (text == "real") return ValueType::Real;
    if (text == "int") return ValueType::Int;
    if (text == "bool") return ValueType::Bool;
    if (text == "complex" || text == "cplx" || text == "cmplx") return ValueType::Complex;
    return std::nullopt;
}

}  // namespace symgrid
