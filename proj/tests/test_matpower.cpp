#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "symgrid/engine.hpp"
#include "symgrid/matpower.hpp"
#include "symgrid/parser.hpp"
#include "symgrid/system.hpp"
#include "symgrid/validate.hpp"
#include "grid_oracle.hpp"
#include "test_support.hpp"

using namespace symgrid;
using namespace symgrid::oracle;

namespace {

const char* kTwoBus = R"(function mpc = two
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	110	1	1.1	0.9;
	2	1	50	20	0	0	1	1	0	110	1	1.1	0.9;
];
mpc.gen = [
	1	0	0	300	-300	1	100	1	250	0;
];
mpc.branch = [
	1	2	0.01	0.1	0	0	0	0	0	0	1	-360	360;
];
)";

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CaseData load_case(const std::string& name) { return parse_case_file(test::case_path(name)); }

Eigen::MatrixXcd dense(const SparseMatrix<Complex>& m) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r) m.for_each_in_row(r, [&](int c, const Complex& v) { d(r, c) += v; });
    return d;
}

RunReport run_emitted(const CaseData& c, const ConvertOptions& o) {
    ModelDocument doc = parse_model(emit_model(c, o));
    auto diags = validate_document(doc);
    for (const auto& d : diags) INFO(format_diagnostic(d));
    REQUIRE_FALSE(has_errors(diags));
    return run_document(doc);
}

ConvertOptions with_format(ModelFormat f, SymbolSet s = SymbolSet::Greek) {
    ConvertOptions o;
    o.format = f;
    o.symbols = s;
    return o;
}

const std::vector<std::string> kCases{"case5", "case9", "case14", "case30", "case118"};

}  // namespace

TEST_CASE("minimal hand-written case", "[matpower][parse]") {
    CaseData c = parse_case(kTwoBus, "two");
    CHECK(c.base_mva == 100);
    REQUIRE(c.buses.size() == 2);
    CHECK(c.gens.size() == 1);
    REQUIRE(c.branches.size() == 1);
    CHECK(c.buses[1].pd == 50);
    CHECK(c.branches[0].x == 0.1);
    CHECK(c.slack_index() == 0);
}

TEST_CASE("comment lines do not change the parsed case", "[matpower][parse]") {
    std::string text = read_file(test::case_path("case9"));
    std::string bare = std::regex_replace(text, std::regex("%[^\n]*"), "");
    std::string noisy = std::regex_replace(text, std::regex(";\n"), ";\n% interleaved comment 1 2 3;\n");
    for (const std::string& variant : {bare, noisy}) {
        CaseData a = parse_case(text), b = parse_case(variant);
        REQUIRE(a.buses.size() == b.buses.size());
        REQUIRE(a.gens.size() == b.gens.size());
        REQUIRE(a.branches.size() == b.branches.size());
        for (std::size_t k = 0; k < a.buses.size(); ++k) {
            CHECK(a.buses[k].id == b.buses[k].id);
            CHECK(a.buses[k].pd == b.buses[k].pd);
            CHECK(a.buses[k].vm == b.buses[k].vm);
        }
        for (std::size_t k = 0; k < a.branches.size(); ++k) {
            CHECK(a.branches[k].r == b.branches[k].r);
            CHECK(a.branches[k].b == b.branches[k].b);
        }
        CHECK(emit_model(a, ConvertOptions{}) == emit_model(b, ConvertOptions{}));
    }
}

TEST_CASE("bundled case table sizes", "[matpower][parse]") {
    CaseData c = load_case("case9");
    CHECK(c.buses.size() == 9);
    CHECK(c.gens.size() == 3);
    CHECK(c.branches.size() == 9);
    CaseData big = load_case("case118");
    CHECK(big.buses.size() == 118);
    CHECK(big.gens.size() == 54);
    CHECK(big.branches.size() == 186);
}

TEST_CASE("malformed cases are rejected", "[matpower][parse]") {
    std::string text(kTwoBus);
    CHECK_THROWS_WITH(parse_case(std::regex_replace(text, std::regex("mpc.gen"), "mpc.generators")),
                      Catch::Matchers::ContainsSubstring("missing gen table"));
    CHECK_THROWS_WITH(parse_case(std::regex_replace(text, std::regex("\t50\t"), "\tfifty\t")),
                      Catch::Matchers::ContainsSubstring("non-numeric"));
    CHECK_THROWS_WITH(parse_case(std::regex_replace(text, std::regex("\t1.1\t0.9;\n\\];\nmpc.gen"), ";\n];\nmpc.gen")),
                      Catch::Matchers::ContainsSubstring("ragged"));
    CHECK_THROWS(parse_case(std::regex_replace(text, std::regex("2\t1\t50"), "2\t3\t50")));
    CaseData zero = parse_case(std::regex_replace(text, std::regex("0.01\t0.1"), "0\t0"));
    CHECK_THROWS_WITH(build_ybus(zero), Catch::Matchers::ContainsSubstring("zero impedance"));
}

TEST_CASE("non-consecutive bus ids", "[matpower][parse]") {
    std::string text = std::regex_replace(kTwoBus, std::regex("\n\t2\t1\t50"), "\n\t20\t1\t50");
    text = std::regex_replace(text, std::regex("\t1\t2\t0.01"), "\t1\t20\t0.01");
    CaseData c = parse_case(text);
    CHECK(c.bus_index(20) == 1);
    auto r = run_emitted(c, ConvertOptions{});
    REQUIRE(r.converged);
    CHECK(find_output(r.outputs, "v_20"));
}

TEST_CASE("single-branch admittance", "[matpower][ybus]") {
    CaseData c = load_case("case3_zi");
    Eigen::MatrixXcd y = dense(build_ybus(c));
    CHECK(std::abs(y(0, 1) + Complex(5.405405, -32.432432)) < 1e-6);
    CHECK(std::abs(y(0, 0)) == Catch::Approx(32.8797974610715).margin(1e-12));
    CHECK(std::abs(y(1, 1)) == Catch::Approx(2 * 32.8797974610715).margin(1e-12));
    CHECK(y(0, 2) == Complex(0));
}

TEST_CASE("admittance matches a dense construction", "[matpower][ybus]") {
    for (const auto& name : kCases) {
        CaseData c = load_case(name);
        Eigen::MatrixXcd got = dense(build_ybus(c));
        Eigen::MatrixXcd want = ybus_oracle(c);
        INFO(name);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("untapped, unshifted, uncharged networks give a symmetric Ybus", "[matpower][ybus][property]") {
    for (const auto& name : kCases) {
        CaseData c = load_case(name);
        for (auto& br : c.branches) br.ratio = 0, br.shift = 0, br.b = 0;
        Eigen::MatrixXcd y = dense(build_ybus(c));
        CHECK((y - y.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("three-node case emits the polar reference model", "[matpower][emit]") {
    CaseData c = load_case("case3_zi");
    ConvertOptions o;
    ModelDocument emitted = parse_model(emit_model(c, o));
    ModelDocument reference = test::load_example(1);
    auto pattern = [](const ModelDocument& doc) {
        Env env(Domain::Real);
        auto vars = declare_model(doc, env);
        EquationSystem sys(doc.groups_of(GroupKind::NLEs)[0]->statements, layout_unknowns(vars, env), env);
        Assembly a = sys.assemble(env);
        std::set<std::pair<int, std::string>> p;
        for (const auto& t : a.jacobian) p.insert({t.row, vars[t.col]});
        return p;
    };
    CHECK(pattern(emitted) == pattern(reference));
    auto re = run_document(emitted), rr = run_document(reference);
    REQUIRE(re.converged);
    REQUIRE(rr.converged);
    for (const char* v : {"δ_2", "v_2", "δ_3", "v_3"})
        CHECK(std::abs(find_output(re.outputs, v)->value.z - find_output(rr.outputs, v)->value.z) < 1e-8);
}

TEST_CASE("three-node case emits the complex reference model", "[matpower][emit]") {
    CaseData c = load_case("case3_zi");
    std::string text = emit_model(c, with_format(ModelFormat::Complex));
    CHECK(text.find("Y_2_1*v_1 + Y_2_2*v_2 + Y_2_3*v_3=0") != std::string::npos);
    CHECK(text.find("conj(Y_2_1*v_1 + Y_2_2*v_2 + Y_2_3*v_3)=0") != std::string::npos);
    ModelDocument doc = parse_model(text);
    auto r = run_document(doc);
    REQUIRE(r.converged);
    CHECK(r.repeats[0].solves[0].newton.equations == 4);
    auto ref = run_document(test::load_example(2));
    CHECK(std::abs(find_output(r.outputs, "v_2")->value.z - find_output(ref.outputs, "v2")->value.z) < 1e-8);
    CHECK(std::abs(find_output(r.outputs, "v_3")->value.z - find_output(ref.outputs, "v3")->value.z) < 1e-8);
}

TEST_CASE("ascii symbols", "[matpower][emit]") {
    CaseData c = load_case("case9");
    std::string text = emit_model(c, with_format(ModelFormat::Polar, SymbolSet::Ascii));
    CHECK(text.find("δ") == std::string::npos);
    CHECK(text.find("θ") == std::string::npos);
    CHECK(text.find("d_2=") != std::string::npos);
    CHECK(emit_model(c, ConvertOptions{}).find("δ_2=") != std::string::npos);
}

TEST_CASE("case9 polar emission counts", "[matpower][emit]") {
    CaseData c = load_case("case9");
    auto r = run_emitted(c, ConvertOptions{});
    REQUIRE(r.converged);
    CHECK(r.repeats[0].solves[0].newton.unknowns == 16);
    CHECK(r.repeats[0].solves[0].newton.equations == 16);
}

TEST_CASE("emission is deterministic", "[matpower][emit][property]") {
    for (const auto& name : kCases)
        for (auto f : {ModelFormat::Polar, ModelFormat::Rectangular, ModelFormat::Complex}) {
            CaseData c = load_case(name);
            CHECK(emit_model(c, with_format(f)) == emit_model(load_case(name), with_format(f)));
        }
}

TEST_CASE("configuration file", "[matpower][config]") {
    ConvertOptions d = load_config("<config><options/></config>");
    CHECK(d.format == ModelFormat::Polar);
    CHECK(d.symbols == SymbolSet::Greek);
    CHECK_FALSE(d.enforce_q_limits);
    CHECK(d.zip_p.p == 1.0);
    CHECK(d.zip_q.z == 0.0);

    ConvertOptions o = load_config(
        "<config><options><format>complex</format><symbols>ascii</symbols></options></config>");
    CHECK(o.format == ModelFormat::Complex);
    CHECK(o.symbols == SymbolSet::Ascii);

    ConvertOptions z = load_config(
        "<config><variables><zip kind=\"PQ\" z=\"0.2\" i=\"0.3\" p=\"0.5\"/></variables>"
        "<limits><enforce_q_limits>true</enforce_q_limits></limits></config>");
    CHECK(z.zip_p.z == 0.2);
    CHECK(z.zip_q.i == 0.3);
    CHECK(z.enforce_q_limits);
    CHECK_THROWS_WITH(load_config("<config><variables><zip kind=\"P\" z=\"0.5\" i=\"0.6\" p=\"0.1\"/></variables></config>"),
                      Catch::Matchers::ContainsSubstring("sum to 1"));
    CHECK_THROWS(load_config("<config><options>"));
    CHECK_THROWS(load_config("<config><options><format>cartesian</format></options></config>"));

    ConvertOptions shipped = load_config_file(test::source_dir() / "data" / "config.xml");
    CHECK(shipped.format == ModelFormat::Polar);
    CHECK(shipped.eps == 1e-10);
}

TEST_CASE("the three formats agree and match a reference power flow", "[matpower][oracle]") {
    for (const auto& name : kCases) {
        INFO(name);
        CaseData c = load_case(name);
        auto reference = reference_power_flow(c);
        std::vector<std::vector<Complex>> sols;
        for (auto f : {ModelFormat::Polar, ModelFormat::Rectangular, ModelFormat::Complex}) {
            auto o = with_format(f);
            auto r = run_emitted(c, o);
            REQUIRE(r.converged);
            sols.push_back(solved_voltages(c, o, r));
            CHECK(max_diff(sols.back(), reference) < 1e-6);
        }
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                for (std::size_t k = 0; k < c.buses.size(); ++k) {
                    CHECK(std::abs(std::abs(sols[a][k]) - std::abs(sols[b][k])) < 1e-8);
                    CHECK(std::abs(std::arg(sols[a][k]) - std::arg(sols[b][k])) < 1e-8);
                }
    }
}

TEST_CASE("solved cases balance real power", "[matpower][oracle][property]") {
    for (const auto& name : kCases) {
        INFO(name);
        CaseData c = load_case(name);
        auto o = with_format(ModelFormat::Complex);
        auto r = run_emitted(c, o);
        REQUIRE(r.converged);
        auto v = solved_voltages(c, o, r);
        auto spec = bus_specs(c);
        const int n = static_cast<int>(c.buses.size());
        // Branch flows and shunt consumption, computed per element.
        std::vector<Complex> leaving(n);
        double losses = 0;
        for (const auto& br : c.branches) {
            if (!br.in_service) continue;
            int f = c.bus_index(br.from), t = c.bus_index(br.to);
            Complex ys = 1.0 / Complex(br.r, br.x), hb(0, br.b / 2);
            double ratio = br.ratio == 0 ? 1.0 : br.ratio;
            Complex tap = std::polar(ratio, br.shift * std::numbers::pi / 180);
            Complex i_f = (ys + hb) / (ratio * ratio) * v[f] - ys / std::conj(tap) * v[t];
            Complex i_t = (ys + hb) * v[t] - ys / tap * v[f];
            Complex s_f = v[f] * std::conj(i_f), s_t = v[t] * std::conj(i_t);
            leaving[f] += s_f;
            leaving[t] += s_t;
            losses += (s_f + s_t).real();
        }
        double generation = 0, load = 0;
        for (int k = 0; k < n; ++k) {
            double shunt = c.buses[k].gs / c.base_mva * std::norm(v[k]);
            losses += shunt;
            load += c.buses[k].pd / c.base_mva;
            if (spec[k].kind == Kind::Slack)
                generation += leaving[k].real() + shunt + c.buses[k].pd / c.base_mva;
            else
                generation += spec[k].pg / c.base_mva;
        }
        CHECK(std::abs(generation - load - losses) < 1e-8);
    }
}

TEST_CASE("reactive limits turn a generator into a PQ source", "[matpower][limits]") {
    std::string text = read_file(test::case_path("case9"));
    text = std::regex_replace(text, std::regex("2\t163\t6.54\t300\t-300"), "2\t163\t6.54\t5\t-300");
    CaseData c = parse_case(text, "case9_qlim");
    ConvertOptions o;
    o.enforce_q_limits = true;
    for (auto f : {ModelFormat::Polar, ModelFormat::Rectangular, ModelFormat::Complex}) {
        o.format = f;
        auto r = run_emitted(c, o);
        REQUIRE(r.converged);
        REQUIRE(r.repeats[0].signals.size() == 1);
        CHECK(r.repeats[0].signals[0].name == "TooHigh");
        CHECK(r.repeats[0].signals[0].group == "Gen2");
        auto v = solved_voltages(c, o, r);
        auto reference = reference_power_flow(c, {{c.bus_index(2), 5.0}});
        CHECK(max_diff(v, reference) < 1e-6);
        CHECK(std::abs(v[c.bus_index(2)]) < 1.025);
    }
    // Unmodified limits are wide enough: no signal.
    auto plain = run_emitted(load_case("case9"), o);
    REQUIRE(plain.converged);
    CHECK(plain.repeats[0].signals.empty());
}

TEST_CASE("ZIP load composition", "[matpower][zip]") {
    CaseData c = load_case("case14");
    ConvertOptions o;
    o.zip_p = o.zip_q = Zip{0.2, 0.3, 0.5};
    for (auto f : {ModelFormat::Polar, ModelFormat::Rectangular, ModelFormat::Complex}) {
        o.format = f;
        auto r = run_emitted(c, o);
        REQUIRE(r.converged);
        auto reference = reference_power_flow(c, {}, o.zip_p);
        CHECK(max_diff(solved_voltages(c, o, r), reference) < 1e-6);
    }
    auto constant = reference_power_flow(c);
    CHECK(max_diff(constant, reference_power_flow(c, {}, o.zip_p)) > 1e-4);
}
