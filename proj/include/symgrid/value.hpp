#pragma once

#include <complex>
#include <string>

namespace symgrid {

using Complex = std::complex<double>;

enum class Domain { Real, Complex };

enum class ValueType { Real, Complex, Int, Bool };

std::string to_string(ValueType type);

/// Typed scalar. Every numeric kind is stored in `z`; booleans use z.real() in {0, 1}.
struct Value {
    ValueType type = ValueType::Real;
    Complex z{};

    static Value real(double x) { return {ValueType::Real, Complex{x, 0.0}}; }
    static Value complex(Complex c) { return {ValueType::Complex, c}; }
    static Value integer(double n) { return {ValueType::Int, Complex{n, 0.0}}; }
    static Value boolean(bool b) { return {ValueType::Bool, Complex{b ? 1.0 : 0.0, 0.0}}; }

    bool is_bool() const { return type == ValueType::Bool; }
    bool is_numeric() const { return type != ValueType::Bool; }
    /// Real, Int, or Complex with an exactly zero imaginary part.
    bool is_real_like() const { return is_numeric() && z.imag() == 0.0; }

    /// Throws EvalError unless the value is real-like.
    double as_real(const char* what = "value") const;
    /// Throws EvalError unless the value is boolean.
    bool as_bool(const char* what = "guard") const;

    friend bool operator==(const Value&, const Value&) = default;
};

/// `%.12g`-style rendering; complex values as `a+bi`.
std::string format_value(const Value& v, int significant_digits = 12);

}  // namespace symgrid
