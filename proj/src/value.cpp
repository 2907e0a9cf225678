#include "symgrid/value.hpp"

#include <fmt/format.h>

#include <cmath>

#include "symgrid/error.hpp"

namespace symgrid {

std::string to_string(ValueType type) {
    switch (type) {
        case ValueType::Real: return "real";
        case ValueType::Complex: return "complex";
        case ValueType::Int: return "int";
        case ValueType::Bool: return "bool";
    }
    return "?";
}

double Value::as_real(const char* what) const {
    if (type == ValueType::Bool) throw EvalError(std::string(what) + " must be numeric, got a boolean");
    if (z.imag() != 0.0) throw EvalError(std::string(what) + " must be real, got a complex value");
    return z.real();
}

bool Value::as_bool(const char* what) const {
    if (type != ValueType::Bool) throw EvalError(std::string(what) + " must be boolean");
    return z.real() != 0.0;
}

std::string format_value(const Value& v, int digits) {
    switch (v.type) {
        case ValueType::Bool: return v.z.real() != 0.0 ? "true" : "false";
        case ValueType::Int: return fmt::format("{:.0f}", v.z.real());
        case ValueType::Real: return fmt::format("{:.{}g}", v.z.real(), digits);
        case ValueType::Complex: {
            double im = v.z.imag();
            return fmt::format("{:.{}g}{}{:.{}g}i", v.z.real(), digits, std::signbit(im) ? "-" : "+",
                               std::abs(im), digits);
        }
    }
    return {};
}

}  // namespace symgrid
