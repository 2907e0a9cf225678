#include "symgrid/newton.hpp"

#include <cmath>

#include "symgrid/error.hpp"

namespace symgrid {

SolveResult newton_solve(const EquationSystem& system, Env& env, double eps, int max_iter,
                         const IterationHook& hook) {
    SolveResult res;
    const int n = system.column_count();
    res.unknowns = n;
    for (int it = 0;; ++it) {
        Assembly a;
        try {
            a = system.assemble(env);
        } catch (const EvalError& e) {
            res.failure = e.what();
            res.iterations = it;
            return res;
        }
        res.equations = static_cast<int>(a.rows.size());
        res.jacobian_nonzeros = a.jacobian.size();
        double norm = inf_norm(a.residual);
        res.residual_norm = norm;
        res.trace.push_back({it, norm, 0.0, a.arms});
        res.iterations = it;
        if (!std::isfinite(norm)) {
            res.failure = "residual is not finite at iteration " + std::to_string(it);
            return res;
        }
        if (norm <= eps) {
            res.converged = true;
            return res;
        }
        if (it >= max_iter) {
            res.failure = "no convergence after " + std::to_string(max_iter) + " iterations (residual " +
                          std::to_string(norm) + ")";
            return res;
        }
        if (res.equations != n) {
            res.failure = "active system has " + std::to_string(res.equations) + " equations for " +
                          std::to_string(n) + " unknowns";
            return res;
        }
        std::vector<Complex> delta;
        try {
            delta = solve_linear(n, a.jacobian, a.residual, env.domain());
        } catch (const SingularMatrixError& e) {
            res.singular = true;
            res.failure = std::string("singular Jacobian at iteration ") + std::to_string(it) + ": " + e.what();
            return res;
        }
        res.trace.back().step_norm = inf_norm(delta);
        apply_step(system.columns(), delta, -1.0, env);
        if (hook) {
            try {
                hook(it + 1);
            } catch (const EvalError& e) {
                res.failure = e.what();
                res.iterations = it + 1;
                return res;
            }
        }
    }
}

}  // namespace symgrid
