#include "symgrid/wls.hpp"

#include <cmath>
#include <map>

#include "symgrid/error.hpp"
#include "symgrid/evaluate.hpp"

namespace symgrid {

double row_weight(const EquationRow& row, const Env& env) {
    const Attribute* a = row.attrs.find("w");
    if (!a) throw EvalError(to_string(row.loc) + ": measurement equation has no weight");
    double w = 0.0;
    if (a->value.kind == AttrValue::Kind::Number)
        w = a->value.number;
    else if (a->value.kind == AttrValue::Kind::Word)
        w = env.get(a->value.text).as_real("weight");
    else
        throw EvalError(to_string(row.loc) + ": weight must be a number or a parameter name");
    if (!(w > 0.0) || !std::isfinite(w)) throw EvalError(to_string(row.loc) + ": weight must be positive");
    return w;
}

namespace {

struct Linearization {
    Assembly h;  // residual = h(x) - z, jacobian = H
    Assembly g;  // residual = g(x), jacobian = C
    std::vector<double> weights;
    std::vector<Complex> r;  // z - h(x)
    std::vector<Complex> z;
};

Linearization linearize(const EquationSystem& meas, const EquationSystem& cons, const Env& env) {
    Linearization lin;
    lin.h = meas.assemble(env);
    lin.g = cons.assemble(env);
    for (std::size_t i = 0; i < lin.h.rows.size(); ++i) {
        const EquationRow& row = *lin.h.rows[i];
        lin.weights.push_back(row_weight(row, env));
        lin.r.push_back(-lin.h.residual[i]);
        lin.z.push_back(row.rhs ? evaluate(*row.rhs, env).z : Complex{});
    }
    return lin;
}

// H^H W v, where H is given row-wise by triplets.
std::vector<Complex> weighted_transpose(const Linearization& lin, const std::vector<Complex>& v, int n) {
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (const auto& t : lin.h.jacobian) out[t.col] += std::conj(t.value) * lin.weights[t.row] * v[t.row];
    return out;
}

struct Step {
    std::vector<Complex> dx;
    std::vector<Complex> mu;
};

Step solve_augmented(const Linearization& lin, int n, Domain domain) {
    const int m = static_cast<int>(lin.g.rows.size());
    std::map<int, std::vector<std::pair<int, Complex>>> by_row;
    for (const auto& t : lin.h.jacobian) by_row[t.row].emplace_back(t.col, t.value);
    std::vector<Triplet<Complex>> a;
    for (const auto& [row, entries] : by_row) {
        const double w = lin.weights[row];
        for (const auto& [ca, va] : entries)
            for (const auto& [cb, vb] : entries) a.push_back({ca, cb, std::conj(va) * w * vb});
    }
    for (const auto& t : lin.g.jacobian) {
        a.push_back({n + t.row, t.col, t.value});
        a.push_back({t.col, n + t.row, std::conj(t.value)});
    }
    std::vector<Complex> rhs = weighted_transpose(lin, lin.r, n);
    for (int j = 0; j < m; ++j) rhs.push_back(-lin.g.residual[j]);
    std::vector<Complex> sol = solve_linear(n + m, a, rhs, domain);
    Step s;
    s.dx.assign(sol.begin(), sol.begin() + n);
    s.mu.assign(sol.begin() + n, sol.end());
    return s;
}

double objective(const Linearization& lin) {
    double j = 0.0;
    for (std::size_t i = 0; i < lin.r.size(); ++i) j += lin.weights[i] * std::norm(lin.r[i]);
    return j;
}

void fill_result(const Linearization& lin, const std::vector<Complex>& lambda, int n, EstimateResult& res) {
    res.measurements.clear();
    for (std::size_t i = 0; i < lin.h.rows.size(); ++i) {
        MeasurementResidual m;
        m.text = lin.h.rows[i]->text;
        m.loc = lin.h.rows[i]->loc;
        m.weight = lin.weights[i];
        m.measured = lin.z[i];
        m.residual = lin.r[i];
        m.estimate = lin.z[i] - lin.r[i];
        m.weighted_square = m.weight * std::norm(m.residual);
        res.measurements.push_back(m);
    }
    res.constraint_texts.clear();
    for (const EquationRow* row : lin.g.rows) res.constraint_texts.push_back(row->text);
    res.constraint_residuals = lin.g.residual;
    res.multipliers = lambda;
    res.objective = objective(lin);
    std::vector<Complex> stat = weighted_transpose(lin, lin.r, n);
    for (const auto& t : lin.g.jacobian) stat[t.col] += std::conj(t.value) * lambda[t.row];
    res.kkt_residual = inf_norm(stat);
    res.kkt_scale = inf_norm(weighted_transpose(lin, lin.z, n));
}

}  // namespace

EstimateResult wls_estimate(const EquationSystem& measurements, const EquationSystem& constraints, Env& env,
                            double eps, int max_iter, const IterationHook& hook) {
    EstimateResult res;
    const int n = measurements.column_count();
    res.unknowns = n;
    const Domain domain = env.domain();
    auto fail = [&](std::string msg) {
        res.failure = std::move(msg);
        return res;
    };
    for (int it = 0;; ++it) {
        Linearization lin;
        Step step;
        try {
            lin = linearize(measurements, constraints, env);
        } catch (const EvalError& e) {
            res.iterations = it;
            return fail(e.what());
        }
        double j = objective(lin);
        res.trace.push_back({it, j, 0.0, lin.h.arms});
        res.iterations = it;
        if (!std::isfinite(j)) return fail("objective is not finite at iteration " + std::to_string(it));
        try {
            step = solve_augmented(lin, n, domain);
        } catch (const SingularMatrixError& e) {
            res.singular = true;
            return fail("singular gain matrix at iteration " + std::to_string(it) +
                        " (state not observable?): " + e.what());
        }
        double dx = inf_norm(step.dx);
        res.trace.back().step_norm = dx;
        if (dx <= eps) {
            // Take the final step, then recompute the multipliers at the returned state.
            apply_step(measurements.columns(), step.dx, 1.0, env);
            try {
                lin = linearize(measurements, constraints, env);
                step = solve_augmented(lin, n, domain);
            } catch (const std::exception& e) {
                return fail(e.what());
            }
            std::vector<Complex> lambda;
            for (const auto& mu : step.mu) lambda.push_back(-mu);
            res.converged = true;
            res.iterations = it + 1;
            fill_result(lin, lambda, n, res);
            return res;
        }
        if (it >= max_iter) {
            std::vector<Complex> lambda;
            for (const auto& mu : step.mu) lambda.push_back(-mu);
            fill_result(lin, lambda, n, res);
            return fail("no convergence after " + std::to_string(max_iter) + " iterations (step " +
                        std::to_string(dx) + ")");
        }
        apply_step(measurements.columns(), step.dx, 1.0, env);
        if (hook) {
            try {
                hook(it + 1);
            } catch (const EvalError& e) {
                res.iterations = it + 1;
                return fail(e.what());
            }
        }
    }
}

}  // namespace symgrid
