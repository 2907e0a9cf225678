#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "symgrid/differentiate.hpp"
#include "symgrid/env.hpp"
#include "symgrid/evaluate.hpp"
#include "symgrid/parser.hpp"

namespace symgrid::oracle {

// Central difference with h = 1e-6 * max(1, |x|).
template <class F>
double central(F&& f, double x) {
    double h = 1e-6 * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) / (2 * h);
}

inline const std::vector<std::string> kRealCompositions = {
    "x^2*3.2*cos(y)",
    "x*32.9*y*sin(z - 1.7 - x)",
    "-x^2*32.9*sin(-1.4) + x*y*cos(z - 1.7 - y)",
    "x*(1 + z^2)*cos(-1.4 + y)",
    "x^2 - y/(1 + x^2)",
    "sqrt(1 + x^2)*exp(y/3)",
    "log(2 + sin(x))*tan(y/4)",
    "atan(x*y) + asin(z/4) + acos(x/5)",
    "(x + 2)^y",
    "e^(x*y) - pi*z^3",
    "abs(x - 3)*y",
    "(x^2 + y^2)^0.5",
    "1/(x^2 + 1)^3",
};

inline const std::vector<std::string> kComplexCompositions = {
    "v2*conj(y22*v2 - y21*v1 - y23*v3)",
    "conj(v2)*(y22*v2 - y21*v1 - y23*v3)",
    "v2*conj(v2)",
    "v1*e^(v2/4)",
    "(v1*conj(v1))^0.5",
    "imag(v1*conj(y22*v1))",
    "real(v2)*v1 - abs(v3)^2",
    "1/(v1 + 3) - conj(v2)^3",
    "sin(v1)*cos(conj(v3)) + r*v2",
};

inline const std::vector<std::string> kRealVars = {"x", "y", "z"};
inline const std::vector<std::string> kComplexVars = {"v1", "v2", "v3"};

// Random complex unknowns and admittances, plus one real parameter `r`.
struct ComplexPoint {
    Env env{Domain::Complex};
    explicit ComplexPoint(std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.2, 1.2);
        for (const char* v : {"v1", "v2", "v3"}) env.define(v, Value::complex({u(rng), u(rng)}), ValueType::Complex, true);
        for (const char* p : {"y21", "y22", "y23"})
            env.define(p, Value::complex({u(rng), u(rng)}), ValueType::Complex, false);
        env.define("r", Value::real(u(rng)), ValueType::Real, false);
    }
};

inline const RealOracle kIsReal = [](std::string_view n) { return n == "r"; };

inline double relative(double err, double scale) { return err / std::max(1.0, scale); }

/// Largest relative error of the symbolic real partial against central differences.
inline double real_fd_error(const std::string& text, const std::string& var, std::mt19937_64& rng, int points) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Expr f = parse_expression(text);
    Expr d = diff_real(f, var);
    double worst = 0;
    for (int k = 0; k < points; ++k) {
        Env env;
        for (const auto& n : kRealVars) env.define(n, Value::real(u(rng)), ValueType::Real, true);
        double sym = evaluate(d, env).as_real();
        auto at = [&](double x) {
            Env e2 = env;
            e2.assign(var, Value::real(x));
            return evaluate(f, e2).as_real();
        };
        worst = std::max(worst, relative(std::abs(sym - central(at, env.get(var).as_real())), std::abs(sym)));
    }
    return worst;
}

/// Largest relative error of both Wirtinger partials against 1/2 (d/da -+ i d/db) by central differences.
inline double wirtinger_fd_error(const std::string& text, const std::string& var, std::mt19937_64& rng, int points) {
    Expr f = normalize_conj(parse_expression(text), kIsReal);
    Expr dv = diff_wirtinger(f, var, false, kIsReal);
    Expr dc = diff_wirtinger(f, var, true, kIsReal);
    double worst = 0;
    for (int k = 0; k < points; ++k) {
        ComplexPoint p(rng);
        Complex v0 = p.env.get(var).z;
        auto at = [&](Complex v) {
            Env e2 = p.env;
            e2.assign(var, Value::complex(v));
            return evaluate(f, e2).z;
        };
        double h = 1e-6 * std::max(1.0, std::abs(v0));
        Complex da = (at(v0 + h) - at(v0 - h)) / (2 * h);
        Complex db = (at(v0 + Complex(0, h)) - at(v0 - Complex(0, h))) / (2 * h);
        Complex want_v = 0.5 * (da - Complex(0, 1) * db);
        Complex want_c = 0.5 * (da + Complex(0, 1) * db);
        Complex got_v = evaluate(dv, p.env).z;
        Complex got_c = evaluate(dc, p.env).z;
        worst = std::max(worst, relative(std::abs(got_v - want_v), std::abs(got_v)));
        worst = std::max(worst, relative(std::abs(got_c - want_c), std::abs(got_c)));
    }
    return worst;
}

/// d f/d v versus conj(d conj(f)/d conj(v)): returns the largest relative mismatch.
inline double conj_pair_error(const std::string& text, const std::string& var, std::mt19937_64& rng, int points) {
    Expr e = normalize_conj(parse_expression(text), kIsReal);
    Expr ce = normalize_conj(make_conj(parse_expression(text)), kIsReal);
    Expr d = diff_wirtinger(e, var, false, kIsReal);
    Expr dc = diff_wirtinger(ce, var, true, kIsReal);
    double worst = 0;
    for (int k = 0; k < points; ++k) {
        ComplexPoint p(rng);
        Complex a = evaluate(d, p.env).z;
        Complex b = std::conj(evaluate(dc, p.env).z);
        worst = std::max(worst, relative(std::abs(a - b), std::abs(a)));
    }
    return worst;
}

/// Occurrence of v in f mirrors occurrence of conj(v) in conj(f), and vice versa.
inline bool conj_pair_structure(const std::string& text, const std::string& var) {
    Expr e = normalize_conj(parse_expression(text), kIsReal);
    Expr ce = normalize_conj(make_conj(parse_expression(text)), kIsReal);
    return occurs_wirtinger(e, var, false) == occurs_wirtinger(ce, var, true) &&
           occurs_wirtinger(e, var, true) == occurs_wirtinger(ce, var, false);
}

}  // namespace symgrid::oracle
