#include "symgrid/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "symgrid/engine.hpp"
#include "symgrid/matpower.hpp"
#include "symgrid/parser.hpp"
#include "symgrid/report.hpp"
#include "symgrid/validate.hpp"

namespace symgrid {

namespace fs = std::filesystem;

namespace {

struct SolveArgs {
    std::string input;
    std::string out;
    std::uint64_t seed = 0;
    std::string report;
};

struct ConvertArgs {
    std::string input;
    std::string out;
    std::string config;
    std::string format;
    std::string symbols;
};

int solve(const SolveArgs& a, std::ostream& out, std::ostream& err, const std::string& usage) {
    if (!fs::exists(a.input)) {
        err << "error: cannot open model file '" << a.input << "'\n" << usage;
        return 2;
    }
    ModelDocument doc;
    try {
        doc = parse_model_file(a.input);
    } catch (const ModelError& e) {
        err << format_diagnostic({Severity::Error, e.loc(), e.bare_message()}, a.input) << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    auto diags = validate_document(doc);
    for (const auto& d : diags) err << format_diagnostic(d, a.input) << "\n";
    if (has_errors(diags)) return 2;

    RunReport run = run_document(doc, a.seed);
    ReportLevel level = run.settings.report;
    if (!a.report.empty()) level = *parse_report_level(a.report);
    std::string text = format_report(run, level);
    fs::path trace_dir = fs::path(a.input).parent_path();
    try {
        if (a.out.empty()) {
            out << text;
        } else {
            write_text_file(a.out, text);
            trace_dir = fs::path(a.out).parent_path();
        }
        if (run.has_repeats && !run.repeats.empty())
            write_text_file(trace_dir / (fs::path(a.input).stem().string() + ".trace.csv"), format_trace_csv(run));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (!run.converged) {
        err << "error: " << run.error << "\n";
        return 1;
    }
    return 0;
}

int convert(const ConvertArgs& a, std::ostream& out, std::ostream& err, const std::string& usage) {
    if (!fs::exists(a.input)) {
        err << "error: cannot open case file '" << a.input << "'\n" << usage;
        return 2;
    }
    try {
        ConvertOptions options;
        if (!a.config.empty()) options = load_config_file(a.config);
        if (!a.format.empty()) options.format = *parse_model_format(a.format);
        if (!a.symbols.empty()) options.symbols = *parse_symbol_set(a.symbols);
        CaseData c = parse_case_file(a.input);
        fs::path target = a.out.empty() ? fs::path(a.input).replace_extension(".mod") : fs::path(a.out);
        write_text_file(target, emit_model(c, options));
        out << "wrote " << target.string() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

void add_solve_options(CLI::App& app, SolveArgs& a) {
    app.add_option("model", a.input, "model file (.mod)")->required();
    app.add_option("--out", a.out, "write the report to this file");
    app.add_option("--seed", a.seed, "random seed for rnd()");
    app.add_option("--report", a.report, "report level")
        ->check(CLI::IsMember({"Solved", "All", "AllDetails"}));
}

void add_convert_options(CLI::App& app, ConvertArgs& a) {
    app.add_option("case", a.input, "MATPOWER case file (.m)")->required();
    app.add_option("--out", a.out, "output model file (default: next to the input)");
    app.add_option("--config", a.config, "XML converter configuration");
    app.add_option("--format", a.format, "polar, rectangular or complex")
        ->check(CLI::IsMember({"polar", "rectangular", "rect", "complex", "cplx", "cmplx"}));
    app.add_option("--symbols", a.symbols, "greek or ascii")->check(CLI::IsMember({"greek", "ascii"}));
}

int parse_failure(const CLI::App& app, const CLI::ParseError& e, std::ostream& out, std::ostream& err) {
    if (e.get_exit_code() == 0) {
        out << app.help();
        return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const std::string program = args.empty() ? "symgrid" : fs::path(args[0]).filename().string();
    std::vector<std::string> rest(args.empty() ? args.begin() : args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());  // CLI11 consumes vectors back to front

    if (program == "modelSolver") {
        CLI::App app{"Solve a model file", program};
        SolveArgs a;
        add_solve_options(app, a);
        try {
            app.parse(rest);
        } catch (const CLI::ParseError& e) {
            return parse_failure(app, e, out, err);
        }
        return solve(a, out, err, app.help());
    }
    if (program == "matp2modl") {
        CLI::App app{"Convert a MATPOWER case into a model file", program};
        ConvertArgs a;
        add_convert_options(app, a);
        try {
            app.parse(rest);
        } catch (const CLI::ParseError& e) {
            return parse_failure(app, e, out, err);
        }
        return convert(a, out, err, app.help());
    }

    CLI::App app{"Symbolic model-driven power network solver", program};
    app.require_subcommand(1);
    SolveArgs s;
    ConvertArgs c;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve a model file");
    add_solve_options(*solve_cmd, s);
    CLI::App* convert_cmd = app.add_subcommand("convert", "convert a MATPOWER case file");
    add_convert_options(*convert_cmd, c);
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        return parse_failure(app, e, out, err);
    }
    if (solve_cmd->parsed()) return solve(s, out, err, solve_cmd->help());
    return convert(c, out, err, convert_cmd->help());
}

}  // namespace symgrid
