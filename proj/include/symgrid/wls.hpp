#pragma once

#include <string>
#include <vector>

#include "symgrid/newton.hpp"
#include "symgrid/system.hpp"

namespace symgrid {

struct MeasurementResidual {
    std::string text;
    SourceLoc loc;
    double weight = 0.0;
    Complex measured;  // z
    Complex estimate;  // h(x)
    Complex residual;  // z - h(x)
    double weighted_square = 0.0;
};

struct EstimateResult {
    bool converged = false;
    int iterations = 0;
    std::string failure;
    bool singular = false;
    int unknowns = 0;
    std::vector<IterationRecord> trace;  // residual_norm holds J(x), step_norm the step size

    // Evaluated at the returned state.
    std::vector<MeasurementResidual> measurements;
    std::vector<std::string> constraint_texts;
    std::vector<Complex> constraint_residuals;  // g(x)
    std::vector<Complex> multipliers;           // lambda, with H^H W r + C^H lambda = 0
    double objective = 0.0;                     // sum w |r|^2
    double kkt_residual = 0.0;                  // ||H^H W r + C^H lambda||_inf
    double kkt_scale = 0.0;                     // ||H^H W z||_inf
};

/// Reads the `[w=...]` attribute of a measurement row (literal or parameter name).
double row_weight(const EquationRow& row, const Env& env);

/// Equality-constrained Gauss-Newton. Each iteration solves
/// [[H^H W H, C^H], [C, 0]] [dx; mu] = [H^H W r; -g] and applies x += dx.
/// Converges when ||dx||_inf <= eps. Failures are reported, not thrown.
EstimateResult wls_estimate(const EquationSystem& measurements, const EquationSystem& constraints, Env& env,
                            double eps, int max_iter, const IterationHook& hook = {});

}  // namespace symgrid
