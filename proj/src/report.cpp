#include "symgrid/report.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace symgrid {

namespace {

std::string num(double x) { return fmt::format("{:.12g}", x); }

void append_outputs(std::string& out, const std::vector<OutputValue>& values, const std::string& indent) {
    for (const auto& v : values) {
        out += indent + v.name + " = " + format_value(v.value, 12);
        if (v.value.type == ValueType::Complex)
            out += "  (abs " + num(std::abs(v.value.z)) + ", arg " + num(std::arg(v.value.z)) + ")";
        out += "\n";
    }
}

void append_solve(std::string& out, const SolveRecord& sr, ReportLevel level) {
    out += fmt::format("  solve {}: {} after {} iterations", sr.outer, sr.converged ? "converged" : "failed",
                       sr.iterations);
    if (!sr.failure.empty()) out += " (" + sr.failure + ")";
    out += "\n";
    const std::vector<IterationRecord>& trace = sr.estimate ? sr.estimate->trace : sr.newton.trace;
    for (const auto& it : trace) {
        if (sr.estimate)
            out += fmt::format("    iter {}: J = {} step = {}", it.iteration, num(it.residual_norm), num(it.step_norm));
        else
            out += fmt::format("    iter {}: residual = {} step = {}", it.iteration, num(it.residual_norm),
                               num(it.step_norm));
        if (level == ReportLevel::AllDetails && !it.arms.empty()) {
            out += " arms =";
            for (int a : it.arms) out += " " + std::to_string(a);
        }
        out += "\n";
    }
    if (level == ReportLevel::AllDetails) {
        if (!sr.estimate)
            out += fmt::format("    system: {} equations, {} unknowns, {} jacobian nonzeros ({} symbolic)\n",
                               sr.newton.equations, sr.newton.unknowns, sr.newton.jacobian_nonzeros,
                               sr.symbolic_nonzeros);
        else
            out += fmt::format("    system: {} unknowns, {} symbolic jacobian entries\n", sr.estimate->unknowns,
                               sr.symbolic_nonzeros);
        for (const auto& line : sr.limit_log) out += "    limits: " + line + "\n";
    }
    if (sr.estimate && sr.converged) {
        std::string table = format_residual_table(*sr.estimate);
        std::size_t pos = 0;
        while (pos < table.size()) {
            std::size_t end = table.find('\n', pos);
            out += "    " + table.substr(pos, end - pos) + "\n";
            pos = end + 1;
        }
    }
}

}  // namespace

std::string format_residual_table(const EstimateResult& r) {
    std::string out = "measurement | weight | residual | weighted squared residual\n";
    for (const auto& m : r.measurements)
        out += m.text + " | " + num(m.weight) + " | " + format_value(Value::complex(m.residual), 12) + " | " +
               num(m.weighted_square) + "\n";
    for (std::size_t i = 0; i < r.constraint_texts.size(); ++i)
        out += "constraint " + r.constraint_texts[i] + " | residual " +
               format_value(Value::complex(r.constraint_residuals[i]), 12) + " | lambda " +
               format_value(Value::complex(r.multipliers[i]), 12) + "\n";
    out += "J(x) = " + num(r.objective) + "\n";
    return out;
}

std::string format_report(const RunReport& run, ReportLevel level) {
    std::string out;
    if (level == ReportLevel::Solved) {
        if (!run.converged) return "not converged: " + run.error + "\n";
        append_outputs(out, run.outputs, "");
        return out;
    }
    out += "model: " + (run.model_name.empty() ? std::string("(unnamed)") : run.model_name) + "\n";
    out += fmt::format("type: {}, domain: {}, eps: {}, seed: {}\n", to_string(run.settings.type),
                       run.settings.domain == Domain::Complex ? "complex" : "real", num(run.settings.eps), run.seed);
    for (const auto& rec : run.repeats) {
        out += fmt::format("pass {}: {}\n", rec.index, rec.converged ? "converged" : "not converged");
        if (level == ReportLevel::AllDetails)
            for (const auto& line : rec.submodel_log) out += "  " + line + "\n";
        for (const auto& sr : rec.solves) append_solve(out, sr, level);
        for (const auto& sig : rec.signals)
            out += fmt::format("  signal {} (group \"{}\", case {}, pass {}, outer {})\n", sig.name, sig.group,
                               sig.case_index, sig.repeat, sig.outer);
        if (!rec.outputs.empty()) {
            out += "  values:\n";
            append_outputs(out, rec.outputs, "    ");
        }
    }
    if (run.repeats_stopped_by_failure) out += "repeats stopped: last pass failed to solve\n";
    if (run.converged) {
        out += "solved:\n";
        append_outputs(out, run.outputs, "  ");
    } else {
        out += "not converged: " + run.error + "\n";
    }
    return out;
}

std::string format_trace_csv(const RunReport& run) {
    std::vector<std::pair<std::string, bool>> columns;  // name, complex
    for (const auto& rec : run.repeats) {
        if (rec.outputs.empty()) continue;
        for (const auto& v : rec.outputs) columns.emplace_back(v.name, v.value.type == ValueType::Complex);
        break;
    }
    std::string out = "repeat,converged";
    for (const auto& [name, complex] : columns) {
        if (complex)
            out += "," + name + "_re," + name + "_im," + name + "_abs";
        else
            out += "," + name;
    }
    out += "\n";
    for (const auto& rec : run.repeats) {
        out += fmt::format("{},{}", rec.index, rec.converged ? 1 : 0);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i >= rec.outputs.size()) {
                out += columns[i].second ? ",,," : ",";
                continue;
            }
            const Value& v = rec.outputs[i].value;
            if (columns[i].second)
                out += "," + num(v.z.real()) + "," + num(v.z.imag()) + "," + num(std::abs(v.z));
            else
                out += "," + num(v.z.real());
        }
        out += "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

}  // namespace symgrid
