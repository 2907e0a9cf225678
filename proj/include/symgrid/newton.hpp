#pragma once

#include <functional>
#include <string>
#include <vector>

#include "symgrid/system.hpp"

namespace symgrid {

struct IterationRecord {
    int iteration = 0;
    double residual_norm = 0.0;  // inf-norm of the residual at the start of the iteration
    double step_norm = 0.0;      // inf-norm of the applied step (0 when none was taken)
    std::vector<int> arms;       // conditional arms active at this iteration
};

struct SolveResult {
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
    std::string failure;  // empty unless the solve failed
    bool singular = false;
    int equations = 0;
    int unknowns = 0;
    std::size_t jacobian_nonzeros = 0;
    std::vector<IterationRecord> trace;
};

/// Called after each applied step with the 1-based iteration count.
using IterationHook = std::function<void(int)>;

/// Full Newton-Raphson on the active equations, starting from the values in `env`.
/// Converges when the residual inf-norm is <= eps. Failures are reported, not thrown.
SolveResult newton_solve(const EquationSystem& system, Env& env, double eps, int max_iter,
                         const IterationHook& hook = {});

}  // namespace symgrid
