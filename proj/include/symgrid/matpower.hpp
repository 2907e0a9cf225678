#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symgrid/sparse.hpp"
#include "symgrid/value.hpp"

namespace symgrid {

struct BusRow {
    int id = 0;
    int type = 1;  // 1 PQ, 2 PV, 3 slack, 4 isolated
    double pd = 0, qd = 0, gs = 0, bs = 0, vm = 1, va = 0, base_kv = 0;
};

struct GenRow {
    int bus = 0;
    double pg = 0, qg = 0, qmax = 0, qmin = 0, vg = 1;
    bool in_service = true;
};

struct BranchRow {
    int from = 0, to = 0;
    double r = 0, x = 0, b = 0, ratio = 0, shift = 0;  // shift in degrees; ratio 0 means 1
    bool in_service = true;
};

struct CaseData {
    std::string name;
    double base_mva = 100.0;
    std::vector<BusRow> buses;
    std::vector<GenRow> gens;
    std::vector<BranchRow> branches;
    std::map<int, int> index;  // bus id -> row

    int bus_index(int id) const;
    int slack_index() const;
};

/// Parses MATPOWER `.m` case text (baseMVA, bus, gen, branch; other tables ignored).
CaseData parse_case(const std::string& text, const std::string& name = "case");
CaseData parse_case_file(const std::filesystem::path& path);

/// Bus admittance matrix in per unit, rows/cols in bus table order.
SparseMatrix<Complex> build_ybus(const CaseData& c);

enum class ModelFormat { Polar, Rectangular, Complex };
enum class SymbolSet { Greek, Ascii };

struct Zip {
    double z = 0.0, i = 0.0, p = 1.0;
};

struct ConvertOptions {
    ModelFormat format = ModelFormat::Polar;
    SymbolSet symbols = SymbolSet::Greek;
    bool enforce_q_limits = false;
    Zip zip_p;
    Zip zip_q;
    double eps = 1e-10;
    int max_iter = 50;
};

std::string to_string(ModelFormat f);
std::optional<ModelFormat> parse_model_format(std::string_view text);
std::optional<SymbolSet> parse_symbol_set(std::string_view text);

/// Reads the XML converter configuration. Throws std::runtime_error on malformed
/// markup, unknown values, or ZIP fractions that do not sum to 1.
ConvertOptions load_config(const std::string& xml);
ConvertOptions load_config_file(const std::filesystem::path& path);

/// Emits an NL model file equivalent to the case in the requested format.
std::string emit_model(const CaseData& c, const ConvertOptions& options);

/// Names of the voltage unknowns emitted for bus row `k`: polar (angle, magnitude),
/// rectangular (real, imaginary), or complex (phasor, empty).
std::pair<std::string, std::string> voltage_names(const CaseData& c, int k, const ConvertOptions& options);

}  // namespace symgrid
