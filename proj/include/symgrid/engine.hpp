#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "symgrid/ast.hpp"
#include "symgrid/env.hpp"
#include "symgrid/newton.hpp"
#include "symgrid/wls.hpp"

namespace symgrid {

struct Signal {
    std::string name;   // TooLow, TooHigh, Rounding, ...
    std::string group;  // limit group name
    int case_index = 0; // arm index inside its if/switch
    int repeat = 0;
    int outer = 0;
};

struct OutputValue {
    std::string name;
    Value value;
    bool variable = false;
};

/// One inner solve (Newton or Gauss-Newton) with what the limit pass did after it.
struct SolveRecord {
    int outer = 0;
    bool converged = false;
    int iterations = 0;
    std::string failure;
    ModelType type = ModelType::NL;
    SolveResult newton;                   // NL models
    std::optional<EstimateResult> estimate;  // WLS models
    std::size_t symbolic_nonzeros = 0;
    std::vector<std::string> limit_log;
};

struct RepeatRecord {
    int index = 0;
    bool converged = false;
    std::vector<SolveRecord> solves;
    std::vector<Signal> signals;
    std::vector<OutputValue> outputs;  // out-tagged values after this pass's solve
    std::vector<std::string> submodel_log;
};

struct RunReport {
    std::string model_name;
    ModelSettings settings;
    std::uint64_t seed = 0;
    bool converged = false;  // final state is a converged solution
    std::string error;       // run-level failure description
    bool has_repeats = false;
    bool repeats_stopped_by_failure = false;
    std::vector<RepeatRecord> repeats;
    std::vector<OutputValue> outputs;  // final out-tagged values (empty unless converged)
    std::vector<std::string> output_names;
};

/// Executes a validated document. Never throws for model-level failures; they are
/// reported through RunReport::error.
RunReport run_document(const ModelDocument& doc, std::uint64_t seed = 0);

/// Declares the distributions, parameters and variables of the main model into `env`
/// (which must use the model's domain). Returns the variable names in declaration order.
std::vector<std::string> declare_model(const ModelDocument& doc, Env& env);

/// Replaces the initializer of parameter `name` (main model or any submodel).
/// Returns false if no such parameter exists.
bool override_param(ModelDocument& doc, const std::string& name, const std::string& expr_text);
/// Sets a model attribute so that it takes precedence over any existing occurrence.
void override_model_attribute(ModelDocument& doc, const std::string& name, const AttrValue& value);
/// Sets an attribute of distribution `name` in any submodel. Returns false if not found.
bool override_distribution(ModelDocument& doc, const std::string& name, const std::string& attr, double value);

/// Runs the enabled limit groups in order against converged values in `env`, stopping
/// after the first group in which a signal fires. Returns true if a re-solve is needed.
bool process_limit_groups(const ModelDocument& doc, Env& env, int repeat, int outer, std::vector<Signal>& fired,
                          std::vector<std::string>* log = nullptr);

/// Applies one assignment statement in `env` (`@main.` targets write to the parent).
/// Returns the name written in the parent scope, if any.
std::optional<std::string> apply_assignment(const AssignStmt& st, Env& env);

}  // namespace symgrid
