#include "symgrid/matpower.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "symgrid/parser.hpp"
#include "symgrid/printer.hpp"

namespace symgrid {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string strip_comments(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_comment = false;
    for (char c : text) {
        if (c == '\n') in_comment = false;
        if (c == '%') in_comment = true;
        if (!in_comment) out += c;
    }
    return out;
}

double parse_number(const std::string& field, const std::string& table) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != field.size()) throw std::runtime_error("non-numeric field '" + field + "' in " + table + " table");
    return v;
}

std::vector<std::vector<double>> table(const std::string& text, const std::string& name, std::size_t min_cols) {
    std::regex head("(^|[^A-Za-z0-9_])(mpc\\.)?" + name + "\\s*=\\s*\\[");
    std::smatch m;
    if (!std::regex_search(text, m, head)) throw std::runtime_error("missing " + name + " table");
    std::size_t start = static_cast<std::size_t>(m.position(0) + m.length(0));
    std::size_t end = text.find(']', start);
    if (end == std::string::npos) throw std::runtime_error("unterminated " + name + " table");
    std::string body = text.substr(start, end - start);
    for (char& c : body)
        if (c == ';') c = '\n';
    std::vector<std::vector<double>> rows;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        for (char& c : line)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream fields(line);
        std::vector<double> row;
        std::string f;
        while (fields >> f) row.push_back(parse_number(f, name));
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged row in " + name + " table");
        rows.push_back(std::move(row));
    }
    if (!rows.empty() && rows.front().size() < min_cols)
        throw std::runtime_error(name + " table needs at least " + std::to_string(min_cols) + " columns");
    return rows;
}

std::string num(double x) { return format_number(x); }

std::string cplx(Complex z) {
    std::string re = num(z.real());
    std::string im = num(std::abs(z.imag()));
    return "(" + re + (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+") + im + "i)";
}

std::string join_terms(const std::vector<std::string>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (out.empty())
            out = t;
        else if (!t.empty() && t[0] == '-')
            out += " - " + t.substr(1);
        else
            out += " + " + t;
    }
    return out.empty() ? "0" : out;
}

enum class BusKind { Slack, PV, PQ, ZeroInjection };

struct BusInfo {
    BusKind kind = BusKind::PQ;
    double pg = 0, qg = 0, qmax = 0, qmin = 0, vg = 1;
    bool has_gen = false;
};

bool is_trivial(const Zip& z) { return z.z == 0.0 && z.i == 0.0 && z.p == 1.0; }

class Emitter {
  public:
    Emitter(const CaseData& c, const ConvertOptions& o) : c_(c), o_(o), y_(build_ybus(c)) {
        const int n = static_cast<int>(c.buses.size());
        info_.resize(n);
        for (const auto& g : c.gens) {
            if (!g.in_service) continue;
            BusInfo& b = info_[c.bus_index(g.bus)];
            if (!b.has_gen) b.vg = g.vg;
            b.has_gen = true;
            b.pg += g.pg;
            b.qg += g.qg;
            b.qmax += g.qmax;
            b.qmin += g.qmin;
        }
        for (int k = 0; k < n; ++k) {
            const BusRow& r = c.buses[k];
            BusInfo& b = info_[k];
            if (r.type == 3)
                b.kind = BusKind::Slack;
            else if (r.type == 2 && b.has_gen)
                b.kind = BusKind::PV;
            else if (r.pd == 0.0 && r.qd == 0.0 && !b.has_gen)
                b.kind = BusKind::ZeroInjection;
            else
                b.kind = BusKind::PQ;
        }
    }

    std::string emit() {
        const int n = static_cast<int>(c_.buses.size());
        std::string vars, params, nles, limits;
        for (int k = 0; k < n; ++k) declare_bus(k, vars, params);
        declare_network(params);
        for (int k = 0; k < n; ++k) equations(k, nles, limits);

        const bool complex = o_.format == ModelFormat::Complex;
        std::string out;
        out += "Header:\n    maxIter=" + std::to_string(o_.max_iter) + "\n    report=Solved\nend\n";
        out += fmt::format("Model [type=NL domain={} eps={} name=\"{} {}\"]:\n", complex ? "cmplx" : "real",
                           num(o_.eps), c_.name, to_string(o_.format));
        out += "Vars [out=true]:\n" + vars;
        out += "Params:\n" + params;
        out += "NLEs:\n" + nles;
        if (!limits.empty()) out += "Limits:\n" + limits;
        out += "end\n";
        return out;
    }

  private:
    std::string id(int k) const { return std::to_string(c_.buses[k].id); }
    bool greek() const { return o_.symbols == SymbolSet::Greek; }
    std::string angle(int k) const { return (greek() ? "δ_" : "d_") + id(k); }
    std::string mag(int k) const { return "v_" + id(k); }
    std::string re(int k) const { return "e_" + id(k); }
    std::string im(int k) const { return "f_" + id(k); }
    std::string phasor(int k) const { return "v_" + id(k); }
    std::string pair(const char* stem, int k, int j) const { return std::string(stem) + id(k) + "_" + id(j); }
    std::string theta(int k, int j) const { return pair(greek() ? "θ_" : "theta_", k, j); }

    Complex start_voltage(int k) const {
        const BusRow& r = c_.buses[k];
        double vm = info_[k].kind == BusKind::PV || info_[k].kind == BusKind::Slack ? info_[k].vg : r.vm;
        return std::polar(vm, r.va * kDeg);
    }

    void declare_bus(int k, std::string& vars, std::string& params) {
        const BusKind kind = info_[k].kind;
        std::string& target = kind == BusKind::Slack ? params : vars;
        const Complex v0 = start_voltage(k);
        switch (o_.format) {
            case ModelFormat::Polar:
                target += "    " + angle(k) + "=" + num(std::arg(v0)) + "; " + mag(k) + "=" + num(std::abs(v0)) + "\n";
                break;
            case ModelFormat::Rectangular:
                target += "    " + re(k) + "=" + num(v0.real()) + "; " + im(k) + "=" + num(v0.imag()) + "\n";
                break;
            case ModelFormat::Complex: target += "    " + phasor(k) + "=" + cplx(v0) + "\n"; break;
        }
        if (kind == BusKind::Slack || kind == BusKind::ZeroInjection) return;
        const BusRow& r = c_.buses[k];
        const BusInfo& b = info_[k];
        const double base = c_.base_mva;
        if (is_trivial(o_.zip_p) || r.pd == 0.0) {
            params += "    P_" + id(k) + "_inj=" + num((b.pg - r.pd) / base) + "\n";
        } else {
            params += "    P_" + id(k) + "_gen=" + num(b.pg / base) + "; P_" + id(k) + "_load=" + num(r.pd / base) + "\n";
        }
        if (kind == BusKind::PV) {
            params += "    V_" + id(k) + "_sp=" + num(b.vg) + "\n";
            if (o_.enforce_q_limits) {
                params += "    Q_" + id(k) + "_inj=" + num((b.qg - r.qd) / base) + " [type=real]\n";
                params += "    Q_" + id(k) + "_inj_min=" + num((b.qmin - r.qd) / base) + " [type=real]; Q_" + id(k) +
                          "_inj_max=" + num((b.qmax - r.qd) / base) + " [type=real]\n";
                params += "    cGen" + id(k) + "Reg=true [type=bool]\n";
            }
        } else if (is_trivial(o_.zip_q) || r.qd == 0.0) {
            params += "    Q_" + id(k) + "_inj=" + num((b.qg - r.qd) / base) + "\n";
        } else {
            params += "    Q_" + id(k) + "_gen=" + num(b.qg / base) + "; Q_" + id(k) + "_load=" + num(r.qd / base) + "\n";
        }
    }

    void declare_network(std::string& params) {
        const int n = static_cast<int>(c_.buses.size());
        for (int k = 0; k < n; ++k) {
            std::vector<std::string> line;
            y_.for_each_in_row(k, [&](int j, const Complex& y) {
                switch (o_.format) {
                    case ModelFormat::Polar:
                        line.push_back(pair("aY_", k, j) + "=" + num(std::abs(y)) + "; " + theta(k, j) + "=" +
                                       num(std::arg(y)));
                        break;
                    case ModelFormat::Rectangular:
                        if (y.real() != 0.0) line.push_back(pair("G_", k, j) + "=" + num(y.real()));
                        if (y.imag() != 0.0) line.push_back(pair("B_", k, j) + "=" + num(y.imag()));
                        break;
                    case ModelFormat::Complex: line.push_back(pair("Y_", k, j) + "=" + cplx(y)); break;
                }
            });
            if (line.empty()) continue;
            std::string text = "    ";
            for (std::size_t i = 0; i < line.size(); ++i) text += (i ? "; " : "") + line[i];
            params += text + "\n";
        }
    }

    // Voltage magnitude and its square as expressions of the unknowns.
    std::string magnitude(int k) const {
        switch (o_.format) {
            case ModelFormat::Polar: return mag(k);
            case ModelFormat::Rectangular: return "(" + re(k) + "^2+" + im(k) + "^2)^0.5";
            default: return "(" + phasor(k) + "*conj(" + phasor(k) + "))^0.5";
        }
    }
    std::string magnitude_sq(int k) const {
        switch (o_.format) {
            case ModelFormat::Polar: return mag(k) + "^2";
            case ModelFormat::Rectangular: return "(" + re(k) + "^2+" + im(k) + "^2)";
            default: return phasor(k) + "*conj(" + phasor(k) + ")";
        }
    }

    std::string zip_value(int k, char pq) const {
        const BusRow& r = c_.buses[k];
        const Zip& z = pq == 'P' ? o_.zip_p : o_.zip_q;
        const std::string base = std::string(1, pq) + "_" + id(k);
        if (is_trivial(z) || (pq == 'P' ? r.pd : r.qd) == 0.0) return base + "_inj";
        std::vector<std::string> parts;
        if (z.z != 0.0) parts.push_back(num(z.z) + "*" + magnitude_sq(k));
        if (z.i != 0.0) parts.push_back(num(z.i) + "*" + magnitude(k));
        if (z.p != 0.0) parts.push_back(num(z.p));
        return base + "_gen - " + base + "_load*(" + join_terms(parts) + ")";
    }

    std::vector<int> neighbours(int k) const {
        std::vector<int> js;
        y_.for_each_in_row(k, [&](int j, const Complex&) { js.push_back(j); });
        return js;
    }

    std::string polar_p(int k) const {
        std::vector<std::string> t;
        for (int j : neighbours(k)) {
            if (j == k)
                t.push_back(mag(k) + "^2*" + pair("aY_", k, k) + "*cos(" + theta(k, k) + ")");
            else
                t.push_back(mag(k) + "*" + pair("aY_", k, j) + "*" + mag(j) + "*cos(" + angle(k) + "-" + theta(k, j) +
                            "-" + angle(j) + ")");
        }
        return join_terms(t);
    }
    std::string polar_q(int k) const {
        std::vector<std::string> t;
        for (int j : neighbours(k)) {
            if (j == k)
                t.push_back("-" + mag(k) + "^2*" + pair("aY_", k, k) + "*sin(" + theta(k, k) + ")");
            else
                t.push_back(mag(k) + "*" + pair("aY_", k, j) + "*" + mag(j) + "*sin(" + angle(k) + "-" + theta(k, j) +
                            "-" + angle(j) + ")");
        }
        return join_terms(t);
    }
    std::string rect_current(int k, bool imag) const {
        std::vector<std::string> t;
        y_.for_each_in_row(k, [&](int j, const Complex& y) {
            // Re: G e - B f; Im: G f + B e
            if (y.real() != 0.0) t.push_back(pair("G_", k, j) + "*" + (imag ? im(j) : re(j)));
            if (y.imag() != 0.0) t.push_back((imag ? "" : "-") + pair("B_", k, j) + "*" + (imag ? re(j) : im(j)));
        });
        return join_terms(t);
    }
    std::string complex_current(int k) const {
        std::vector<std::string> t;
        for (int j : neighbours(k)) t.push_back(pair("Y_", k, j) + "*" + phasor(j));
        return join_terms(t);
    }

    std::string p_calc(int k) const {
        switch (o_.format) {
            case ModelFormat::Polar: return polar_p(k);
            case ModelFormat::Rectangular:
                return re(k) + "*(" + rect_current(k, false) + ") + " + im(k) + "*(" + rect_current(k, true) + ")";
            default: {
                std::string i = complex_current(k);
                return phasor(k) + "*conj(" + i + ") + conj(" + phasor(k) + ")*(" + i + ")";
            }
        }
    }
    std::string q_calc(int k) const {
        switch (o_.format) {
            case ModelFormat::Polar: return polar_q(k);
            case ModelFormat::Rectangular:
                return im(k) + "*(" + rect_current(k, false) + ") - " + re(k) + "*(" + rect_current(k, true) + ")";
            default: {
                std::string i = complex_current(k);
                return phasor(k) + "*conj(" + i + ") - conj(" + phasor(k) + ")*(" + i + ")";
            }
        }
    }
    // Computed reactive injection for limit checks.
    std::string q_value(int k) const {
        if (o_.format == ModelFormat::Complex) return "imag(" + phasor(k) + "*conj(" + complex_current(k) + "))";
        return q_calc(k);
    }

    void equations(int k, std::string& nles, std::string& limits) {
        const BusKind kind = info_[k].kind;
        const bool complex = o_.format == ModelFormat::Complex;
        const std::string tag = "    // bus " + id(k) + "\n";
        if (kind == BusKind::Slack) return;
        if (kind == BusKind::ZeroInjection) {
            nles += tag;
            switch (o_.format) {
                case ModelFormat::Polar: {
                    std::vector<std::string> a, b;
                    for (int j : neighbours(k)) {
                        a.push_back(pair("aY_", k, j) + "*" + mag(j) + "*cos(" + theta(k, j) + "+" + angle(j) + ")");
                        b.push_back(pair("aY_", k, j) + "*" + mag(j) + "*sin(" + theta(k, j) + "+" + angle(j) + ")");
                    }
                    nles += "    " + join_terms(a) + "=0\n    " + join_terms(b) + "=0\n";
                    break;
                }
                case ModelFormat::Rectangular:
                    nles += "    " + rect_current(k, false) + "=0\n    " + rect_current(k, true) + "=0\n";
                    break;
                case ModelFormat::Complex: {
                    std::string i = complex_current(k);
                    nles += "    " + i + "=0\n    conj(" + i + ")=0\n";
                    break;
                }
            }
            return;
        }
        nles += tag;
        const std::string p = zip_value(k, 'P');
        // The complex form writes S + conj(S) = 2P and S - conj(S) = 2iQ.
        nles += "    " + p_calc(k) + " = " + (complex ? "2*(" + p + ")" : p) + "\n";
        if (kind == BusKind::PV) {
            std::string vsp = "V_" + id(k) + "_sp";
            std::string reg = "cGen" + id(k) + "Reg";
            std::string qinj = "Q_" + id(k) + "_inj";
            std::string magnitude_eq = o_.format == ModelFormat::Polar ? mag(k) + " = " + vsp
                                                                       : magnitude_sq(k) + " = " + vsp + "^2";
            if (!o_.enforce_q_limits) {
                nles += "    " + magnitude_eq + "\n";
                return;
            }
            nles += "    if " + reg + ":\n        " + magnitude_eq + "\n    else:\n        " + q_calc(k) + " = " +
                    (complex ? "2i*" + qinj : qinj) + "\n    end\n";
            limits += "group [name=\"Gen" + id(k) + "\"]:\n";
            limits += "    if " + reg + ":\n";
            limits += "        " + qinj + " = " + q_value(k) + "\n";
            limits += "        if " + qinj + " <= " + qinj + "_min [signal=TooLow]:\n";
            limits += "            " + reg + " = false\n            " + qinj + " = " + qinj + "_min\n";
            limits += "        else:\n";
            limits += "            if " + qinj + " >= " + qinj + "_max [signal=TooHigh]:\n";
            limits += "                " + reg + " = false\n                " + qinj + " = " + qinj + "_max\n";
            limits += "            end\n        end\n    end\nend\n";
            return;
        }
        const std::string q = zip_value(k, 'Q');
        nles += "    " + q_calc(k) + " = " + (complex ? "2i*(" + q + ")" : q) + "\n";
    }

    const CaseData& c_;
    const ConvertOptions& o_;
    SparseMatrix<Complex> y_;
    std::vector<BusInfo> info_;
};

}  // namespace

int CaseData::bus_index(int id) const {
    auto it = index.find(id);
    if (it == index.end()) throw std::runtime_error("unknown bus " + std::to_string(id));
    return it->second;
}

int CaseData::slack_index() const {
    int found = -1;
    for (std::size_t k = 0; k < buses.size(); ++k) {
        if (buses[k].type != 3) continue;
        if (found >= 0) throw std::runtime_error("more than one slack bus");
        found = static_cast<int>(k);
    }
    if (found < 0) throw std::runtime_error("no slack bus");
    return found;
}

CaseData parse_case(const std::string& raw, const std::string& name) {
    const std::string text = strip_comments(raw);
    CaseData c;
    c.name = name;
    std::regex base("(^|[^A-Za-z0-9_])(mpc\\.)?baseMVA\\s*=\\s*([^;\\n]+)");
    std::smatch m;
    if (!std::regex_search(text, m, base)) throw std::runtime_error("missing baseMVA");
    std::string value = m[3].str();
    value.erase(value.find_last_not_of(" \t\r") + 1);
    c.base_mva = parse_number(value, "baseMVA");
    for (const auto& r : table(text, "bus", 13)) {
        BusRow b;
        b.id = static_cast<int>(r[0]);
        b.type = static_cast<int>(r[1]);
        b.pd = r[2];
        b.qd = r[3];
        b.gs = r[4];
        b.bs = r[5];
        b.vm = r[7];
        b.va = r[8];
        b.base_kv = r[9];
        if (!c.index.emplace(b.id, static_cast<int>(c.buses.size())).second)
            throw std::runtime_error("duplicate bus id " + std::to_string(b.id));
        c.buses.push_back(b);
    }
    for (const auto& r : table(text, "gen", 8)) {
        GenRow g;
        g.bus = static_cast<int>(r[0]);
        g.pg = r[1];
        g.qg = r[2];
        g.qmax = r[3];
        g.qmin = r[4];
        g.vg = r[5];
        g.in_service = r[7] > 0;
        c.bus_index(g.bus);
        c.gens.push_back(g);
    }
    for (const auto& r : table(text, "branch", 11)) {
        BranchRow br;
        br.from = static_cast<int>(r[0]);
        br.to = static_cast<int>(r[1]);
        br.r = r[2];
        br.x = r[3];
        br.b = r[4];
        br.ratio = r[8];
        br.shift = r[9];
        br.in_service = r[10] > 0;
        c.bus_index(br.from);
        c.bus_index(br.to);
        c.branches.push_back(br);
    }
    c.slack_index();
    return c;
}

CaseData parse_case_file(const std::filesystem::path& path) {
    return parse_case(read_text_file(path), path.stem().string());
}

SparseMatrix<Complex> build_ybus(const CaseData& c) {
    const int n = static_cast<int>(c.buses.size());
    std::vector<Triplet<Complex>> t;
    for (const auto& br : c.branches) {
        if (!br.in_service) continue;
        if (br.r == 0.0 && br.x == 0.0)
            throw std::runtime_error(fmt::format("zero impedance branch {}-{}", br.from, br.to));
        const Complex ys = 1.0 / Complex(br.r, br.x);
        const Complex half_b(0.0, br.b / 2.0);
        const double ratio = br.ratio == 0.0 ? 1.0 : br.ratio;
        const Complex tap = std::polar(ratio, br.shift * kDeg);
        const int f = c.bus_index(br.from);
        const int to = c.bus_index(br.to);
        t.push_back({f, f, (ys + half_b) / (ratio * ratio)});
        t.push_back({f, to, -ys / std::conj(tap)});
        t.push_back({to, f, -ys / tap});
        t.push_back({to, to, ys + half_b});
    }
    for (int k = 0; k < n; ++k) {
        const BusRow& b = c.buses[k];
        if (b.gs != 0.0 || b.bs != 0.0) t.push_back({k, k, Complex(b.gs, b.bs) / c.base_mva});
    }
    return SparseMatrix<Complex>(n, n, std::move(t));
}

std::string to_string(ModelFormat f) {
    switch (f) {
        case ModelFormat::Polar: return "polar";
        case ModelFormat::Rectangular: return "rectangular";
        default: return "complex";
    }
}

std::optional<ModelFormat> parse_model_format(std::string_view text) {
    if (text == "polar") return ModelFormat::Polar;
    if (text == "rectangular" || text == "rect") return ModelFormat::Rectangular;
    if (text == "complex" || text == "cplx" || text == "cmplx") return ModelFormat::Complex;
    return std::nullopt;
}

std::optional<SymbolSet> parse_symbol_set(std::string_view text) {
    if (text == "greek") return SymbolSet::Greek;
    if (text == "ascii") return SymbolSet::Ascii;
    return std::nullopt;
}

ConvertOptions load_config(const std::string& xml) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(xml);
    try {
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw std::runtime_error(std::string("malformed config: ") + e.what());
    }
    ConvertOptions o;
    const pt::ptree& root = tree.get_child("config", pt::ptree());
    if (auto f = root.get_optional<std::string>("options.format")) {
        auto v = parse_model_format(*f);
        if (!v) throw std::runtime_error("unknown format '" + *f + "'");
        o.format = *v;
    }
    if (auto s = root.get_optional<std::string>("options.symbols")) {
        auto v = parse_symbol_set(*s);
        if (!v) throw std::runtime_error("unknown symbols '" + *s + "'");
        o.symbols = *v;
    }
    try {
        o.eps = root.get("options.eps", o.eps);
        o.max_iter = root.get("options.maxIter", o.max_iter);
        o.enforce_q_limits = root.get("limits.enforce_q_limits", o.enforce_q_limits);
        if (auto vars = root.get_child_optional("variables")) {
            for (const auto& [key, node] : *vars) {
                if (key != "zip") continue;
                Zip z{node.get("<xmlattr>.z", 0.0), node.get("<xmlattr>.i", 0.0), node.get("<xmlattr>.p", 1.0)};
                if (std::abs(z.z + z.i + z.p - 1.0) > 1e-12)
                    throw std::runtime_error("ZIP fractions must sum to 1");
                std::string kind = node.get("<xmlattr>.kind", std::string("PQ"));
                if (kind == "P" || kind == "PQ") o.zip_p = z;
                if (kind == "Q" || kind == "PQ") o.zip_q = z;
                if (kind != "P" && kind != "Q" && kind != "PQ") throw std::runtime_error("zip kind must be P, Q or PQ");
            }
        }
    } catch (const pt::ptree_bad_data& e) {
        throw std::runtime_error(std::string("invalid config value: ") + e.what());
    }
    return o;
}

ConvertOptions load_config_file(const std::filesystem::path& path) { return load_config(read_text_file(path)); }

std::string emit_model(const CaseData& c, const ConvertOptions& options) { return Emitter(c, options).emit(); }

std::pair<std::string, std::string> voltage_names(const CaseData& c, int k, const ConvertOptions& o) {
    const std::string id = std::to_string(c.buses[k].id);
    switch (o.format) {
        case ModelFormat::Polar: return {(o.symbols == SymbolSet::Greek ? "δ_" : "d_") + id, "v_" + id};
        case ModelFormat::Rectangular: return {"e_" + id, "f_" + id};
        default: return {"v_" + id, ""};
    }
}

}  // namespace symgrid
