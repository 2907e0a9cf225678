#include "symgrid/system.hpp"

#include <cmath>

#include "symgrid/error.hpp"
#include "symgrid/evaluate.hpp"
#include "symgrid/printer.hpp"

namespace symgrid {

std::vector<UnknownSlot> layout_unknowns(const std::vector<std::string>& variables, const Env& env) {
    std::vector<UnknownSlot> cols;
    for (const auto& name : variables) {
        const Env::Binding* b = env.find(name);
        bool complex = b && b->type == ValueType::Complex && env.domain() == Domain::Complex;
        cols.push_back({name, false, complex});
        if (complex) cols.push_back({name, true, true});
    }
    return cols;
}

EquationSystem::EquationSystem(const std::vector<Statement>& statements, std::vector<UnknownSlot> columns,
                               const Env& env)
    : columns_(std::move(columns)), domain_(env.domain()) {
    for (const auto& st : statements) items_.push_back(compile(st, env));
}

SystemItem EquationSystem::compile(const Statement& st, const Env& env) const {
    if (const auto* eq = std::get_if<EquationStmt>(&st.node)) return compile_equation(*eq, env);
    auto site = std::make_shared<ConditionalSite>();
    auto arm_body = [&](const std::vector<Statement>& body) {
        std::vector<SystemItem> out;
        for (const auto& s : body) out.push_back(compile(s, env));
        return out;
    };
    if (const auto* s = std::get_if<IfStmt>(&st.node)) {
        site->loc = s->loc;
        site->arms.push_back({s->guard, s->guard_attrs, arm_body(s->then_body)});
        site->arms.push_back({std::nullopt, s->else_attrs, arm_body(s->else_body)});
    } else if (const auto* s = std::get_if<SwitchStmt>(&st.node)) {
        site->loc = s->loc;
        for (const auto& c : s->cases) site->arms.push_back({c.guard, c.attrs, arm_body(c.body)});
    } else {
        throw EvalError("only equations and conditionals may appear in an equation group");
    }
    return std::shared_ptr<const ConditionalSite>(std::move(site));
}

EquationRow EquationSystem::compile_equation(const EquationStmt& eq, const Env& env) const {
    RealOracle is_real = [&env](std::string_view name) {
        if (env.domain() == Domain::Real) return true;
        const Env::Binding* b = env.find(name);
        return b && b->type != ValueType::Complex;
    };
    EquationRow row;
    row.loc = eq.loc;
    row.attrs = eq.attrs;
    row.lhs = eq.lhs;
    row.rhs = eq.rhs;
    row.text = print_expr(eq.lhs) + " = " + (eq.rhs ? print_expr(*eq.rhs) : std::string("0"));
    Expr raw = eq.rhs ? make_binary(NodeKind::Subtract, eq.lhs, *eq.rhs) : eq.lhs;
    try {
        if (domain_ == Domain::Complex) {
            row.residual = normalize_conj(raw, is_real);
            for (int c = 0; c < column_count(); ++c) {
                const UnknownSlot& u = columns_[c];
                if (!occurs_wirtinger(row.residual, u.name, u.conjugate)) continue;
                row.partials.emplace_back(c, diff_wirtinger(row.residual, u.name, u.conjugate, is_real));
            }
        } else {
            row.residual = raw;
            for (int c = 0; c < column_count(); ++c) {
                if (!depends_on(raw, columns_[c].name)) continue;
                row.partials.emplace_back(c, diff_real(raw, columns_[c].name));
            }
        }
    } catch (const EvalError& e) {
        throw ModelError(eq.loc, e.what());
    }
    return row;
}

namespace {

void walk(const std::vector<SystemItem>& items, const Env& env, Assembly& out) {
    for (const auto& item : items) {
        if (const auto* row = std::get_if<EquationRow>(&item)) {
            int r = static_cast<int>(out.rows.size());
            try {
                Value v = evaluate(row->residual, env);
                if (v.is_bool()) throw EvalError("equation evaluates to a boolean");
                out.residual.push_back(v.z);
                for (const auto& [c, d] : row->partials) {
                    Value dv = evaluate(d, env);
                    out.jacobian.push_back({r, c, dv.z});
                }
            } catch (const EvalError& e) {
                throw EvalError(to_string(row->loc) + ": " + e.what());
            }
            out.rows.push_back(row);
            continue;
        }
        const auto& site = *std::get<std::shared_ptr<const ConditionalSite>>(item);
        int chosen = -1;
        for (std::size_t a = 0; a < site.arms.size(); ++a) {
            const auto& arm = site.arms[a];
            bool take = true;
            if (arm.guard) {
                try {
                    take = evaluate_guard(*arm.guard, env);
                } catch (const EvalError& e) {
                    throw EvalError(to_string(site.loc) + ": " + e.what());
                }
            }
            if (take) {
                chosen = static_cast<int>(a);
                break;
            }
        }
        if (chosen < 0) throw EvalError(to_string(site.loc) + ": no case of the switch applies");
        out.arms.push_back(chosen);
        walk(site.arms[chosen].body, env, out);
    }
}

std::size_t count_nonzeros(const std::vector<SystemItem>& items) {
    std::size_t n = 0;
    for (const auto& item : items) {
        if (const auto* row = std::get_if<EquationRow>(&item)) {
            n += row->partials.size();
            continue;
        }
        for (const auto& arm : std::get<std::shared_ptr<const ConditionalSite>>(item)->arms)
            n += count_nonzeros(arm.body);
    }
    return n;
}

}  // namespace

Assembly EquationSystem::assemble(const Env& env) const {
    Assembly out;
    walk(items_, env, out);
    return out;
}

std::size_t EquationSystem::symbolic_nonzeros() const { return count_nonzeros(items_); }

void apply_step(const std::vector<UnknownSlot>& columns, const std::vector<Complex>& delta, double sign, Env& env) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const UnknownSlot& u = columns[c];
        if (u.conjugate) continue;
        Complex step = sign * delta[c];
        Complex current = env.get(u.name).z;
        if (u.complex)
            env.assign(u.name, Value::complex(current + step));
        else
            env.assign(u.name, Value::real(current.real() + step.real()));
    }
}

double inf_norm(const std::vector<Complex>& v) {
    double m = 0.0;
    for (const auto& z : v) {
        double a = std::abs(z);
        if (std::isnan(a)) return a;
        m = std::max(m, a);
    }
    return m;
}

std::vector<Complex> solve_linear(int n, const std::vector<Triplet<Complex>>& a, const std::vector<Complex>& b,
                                  Domain domain) {
    if (domain == Domain::Complex) return sparse_solve<Complex>(n, a, b);
    std::vector<Triplet<double>> t;
    t.reserve(a.size());
    for (const auto& e : a) t.push_back({e.row, e.col, e.value.real()});
    std::vector<double> rhs;
    rhs.reserve(b.size());
    for (const auto& r : b) rhs.push_back(r.real());
    std::vector<double> x = sparse_solve<double>(n, t, std::move(rhs));
    return {x.begin(), x.end()};
}

}  // namespace symgrid
