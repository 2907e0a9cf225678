#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "symgrid/differentiate.hpp"
#include "symgrid/engine.hpp"
#include "symgrid/error.hpp"
#include "symgrid/evaluate.hpp"
#include "symgrid/parser.hpp"
#include "symgrid/printer.hpp"
#include "symgrid/system.hpp"
#include "fd_oracle.hpp"
#include "test_support.hpp"

using namespace symgrid;
using namespace symgrid::oracle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Value eval(const std::string& text, const Env& env = Env{}) { return evaluate(parse_expression(text), env); }

bool ident_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

// Occurrences of `name` in `text` as a whole identifier; `conj_form` selects those
// written as `conj(name)` (true) or bare (false).
bool textual_occurs(const std::string& text, const std::string& name, bool conj_form) {
    for (std::size_t p = text.find(name); p != std::string::npos; p = text.find(name, p + 1)) {
        bool left_ok = p == 0 || !ident_byte(static_cast<unsigned char>(text[p - 1]));
        std::size_t end = p + name.size();
        bool right_ok = end == text.size() || !ident_byte(static_cast<unsigned char>(text[end]));
        if (!left_ok || !right_ok) continue;
        bool wrapped = p >= 5 && text.compare(p - 5, 5, "conj(") == 0 && end < text.size() && text[end] == ')';
        if (wrapped == conj_form) return true;
    }
    return false;
}


}  // namespace

TEST_CASE("evaluate worked examples", "[eval]") {
    CHECK_THAT(eval("abs(1/(0.005+0.03i))").as_real(), WithinAbs(32.8797974610715, 1e-12));
    Value w = eval("e^(1i*pi/4)");
    CHECK_THAT(w.z.real(), WithinAbs(0.70710678118654752, 1e-12));
    CHECK_THAT(w.z.imag(), WithinAbs(0.70710678118654752, 1e-12));
    CHECK_THAT(eval("disc(1.017, 1, 0.0125)").as_real(), WithinAbs(1.0125, 1e-15));
    CHECK(eval("round((1.0125-1)/0.0125, 0)").as_real() == 1.0);
    CHECK(eval("round(2.345, 2)").as_real() == Catch::Approx(2.35).epsilon(1e-12));
    CHECK(eval("abs(3+4i)").type == ValueType::Real);
    CHECK(eval("real(3+4i)").as_real() == 3.0);
    CHECK(eval("imag(3+4i)").as_real() == 4.0);
    CHECK(eval("2 < 3").as_bool());
    CHECK(eval("-2^2").as_real() == -4.0);
    CHECK(eval("2^3^2").as_real() == 512.0);
}

TEST_CASE("evaluate errors", "[eval]") {
    CHECK_THROWS_AS(eval("x + 1"), EvalError);
    CHECK_THROWS_AS(eval("1/0"), EvalError);
    CHECK_THROWS_AS(eval("(1+1i) < 2"), EvalError);
    CHECK_THROWS_AS(eval("(1 < 2) + 1"), EvalError);
    CHECK_THROWS_AS(eval("sign(0)"), EvalError);
    Env env;
    env.define("g", Value::real(0), ValueType::Real, false);
    CHECK_THROWS_AS(eval("rnd(g)", env), EvalError);  // not a distribution and no rng
}

TEST_CASE("polar constants of the three-node network", "[eval]") {
    const Complex z(0.005, 0.03);
    CHECK_THAT(std::abs(1.0 / z), WithinAbs(32.8797974610715, 1e-10));
    CHECK_THAT(std::arg(1.0 / z), WithinAbs(-1.40564764938027, 1e-10));
    CHECK_THAT(std::arg(-1.0 / z), WithinAbs(1.73594500420952, 1e-10));
}

TEST_CASE("normalize_conj examples", "[conj]") {
    const RealOracle is_real = [](std::string_view n) { return n == "P"; };
    CHECK(normalize_conj(parse_expression("conj(y22*v2 - y21*v1 - y23*v3)"), is_real) ==
          parse_expression("conj(y22)*conj(v2) - conj(y21)*conj(v1) - conj(y23)*conj(v3)"));
    CHECK(normalize_conj(parse_expression("conj(conj(v3))"), is_real) == parse_expression("v3"));
    CHECK(normalize_conj(parse_expression("conj(S3_inj)"), is_real) == parse_expression("conj(S3_inj)"));
    CHECK(normalize_conj(parse_expression("conj(P)"), is_real) == parse_expression("P"));
    CHECK(normalize_conj(parse_expression("conj(a/b)"), is_real) == parse_expression("conj(a)/conj(b)"));
    Value c = evaluate(normalize_conj(parse_expression("conj(0.3i)"), is_real), Env{});
    CHECK(c.z == Complex(0.0, -0.3));
}

TEST_CASE("diff_real examples", "[diff]") {
    CHECK(print_expr(diff_real(parse_expression("v_3^2*aY33*cos(θ_33)"), "v_3")) == "2*v_3*aY33*cos(θ_33)");
    CHECK(is_zero(diff_real(parse_expression("aY23*v_3*cos(θ_23+δ_3)"), "δ_2")));
    CHECK(diff_real(parse_expression("v_3*aY32*v_2*sin(δ_3-θ_32-δ_2)"), "δ_3") ==
          parse_expression("v_3*aY32*v_2*cos(δ_3-θ_32-δ_2)"));
    CHECK_THROWS_AS(diff_real(parse_expression("round(x, 0)"), "x"), EvalError);
    CHECK_THROWS_AS(diff_real(parse_expression("disc(x, 1, 0.1)"), "x"), EvalError);
    Env env;
    env.define("x", Value::real(0), ValueType::Real, true);
    CHECK_THROWS_AS(evaluate(diff_real(parse_expression("abs(x)"), "x"), env), EvalError);
}

TEST_CASE("diff_wirtinger examples", "[diff]") {
    const RealOracle none = [](std::string_view) { return false; };
    Expr e = normalize_conj(parse_expression("v2*conj(v2)"), none);
    CHECK(diff_wirtinger(e, "v2", false, none) == parse_expression("conj(v2)"));
    CHECK(diff_wirtinger(e, "v2", true, none) == parse_expression("v2"));
    e = normalize_conj(parse_expression("v3*conj(y33*v3 - y23*v2)"), none);
    CHECK(diff_wirtinger(e, "v3", true, none) == parse_expression("v3*conj(y33)"));
    e = normalize_conj(parse_expression("y22*v2 - y21*v1 - y23*v3"), none);
    CHECK(is_zero(diff_wirtinger(e, "v2", true, none)));
    CHECK(is_one(diff_wirtinger(parse_expression("v"), "v", false, none)));
    CHECK(is_zero(diff_wirtinger(parse_expression("conj(v)"), "v", false, none)));
    CHECK(is_zero(diff_wirtinger(parse_expression("v"), "v", true, none)));
    CHECK(is_one(diff_wirtinger(parse_expression("conj(v)"), "v", true, none)));
}

TEST_CASE("jacobian structure of the polar example matches a textual scan", "[structure]") {
    ModelDocument doc = test::load_example(1);
    Env env(Domain::Real);
    auto vars = declare_model(doc, env);
    std::vector<Statement> eqs = doc.groups_of(GroupKind::NLEs)[0]->statements;
    EquationSystem sys(eqs, layout_unknowns(vars, env), env);
    Assembly a = sys.assemble(env);
    REQUIRE(a.rows.size() == 4);
    std::set<std::pair<int, int>> pattern;
    for (const auto& t : a.jacobian) pattern.insert({t.row, t.col});
    std::set<std::pair<int, int>> oracle;
    for (int i = 0; i < 4; ++i)
        for (int c = 0; c < 4; ++c)
            if (textual_occurs(a.rows[i]->text, vars[c], false)) oracle.insert({i, c});
    CHECK(pattern == oracle);
    CHECK(pattern.size() == 16);
}

TEST_CASE("jacobian structure of the complex example matches a Wirtinger scan", "[structure]") {
    ModelDocument doc = test::load_example(2);
    Env env(Domain::Complex);
    auto vars = declare_model(doc, env);
    auto cols = layout_unknowns(vars, env);
    REQUIRE(cols.size() == 4);
    EquationSystem sys(doc.groups_of(GroupKind::NLEs)[0]->statements, cols, env);
    Assembly a = sys.assemble(env);
    std::set<std::pair<int, int>> pattern;
    for (const auto& t : a.jacobian) pattern.insert({t.row, t.col});
    std::set<std::pair<int, int>> oracle;
    for (int i = 0; i < 4; ++i) {
        std::string text = print_expr(a.rows[i]->residual);
        for (int c = 0; c < 4; ++c)
            if (textual_occurs(text, cols[c].name, cols[c].conjugate)) oracle.insert({i, c});
    }
    CHECK(pattern == oracle);
    // The current-sum row is holomorphic: no conjugate columns.
    CHECK(!pattern.count({0, 1}));
    CHECK(!pattern.count({0, 3}));
    CHECK(pattern.size() == 10);
}

TEST_CASE("single equation structure", "[structure]") {
    Env env;
    env.define("x", Value::real(1), ValueType::Real, true);
    ModelDocument doc = parse_model("Header: end\nModel [type=NL domain=real]:\nVars: x=1\nNLEs: x^2=4\nend\n");
    EquationSystem sys(doc.groups_of(GroupKind::NLEs)[0]->statements, layout_unknowns({"x"}, env), env);
    Assembly a = sys.assemble(env);
    REQUIRE(a.jacobian.size() == 1);
    CHECK(a.jacobian[0].row == 0);
    CHECK(a.jacobian[0].col == 0);
    CHECK(a.residual[0].real() == -3.0);
    CHECK(a.jacobian[0].value.real() == 2.0);
}

TEST_CASE("property: real derivatives agree with central differences", "[property][diff]") {
    std::mt19937_64 rng(7001);
    for (const auto& text : kRealCompositions)
        for (const auto& var : kRealVars) {
            INFO(text << " d/d" << var);
            CHECK(real_fd_error(text, var, rng, 200) < 1e-6);
        }
}

TEST_CASE("property: Wirtinger derivatives agree with central differences", "[property][diff]") {
    std::mt19937_64 rng(7002);
    for (const auto& text : kComplexCompositions)
        for (const auto& var : kComplexVars) {
            INFO(text << " wrt " << var);
            CHECK(wirtinger_fd_error(text, var, rng, 200) < 1e-6);
        }
}

TEST_CASE("property: Wirtinger conjugate-pair symmetry", "[property][diff]") {
    std::mt19937_64 rng(7003);
    for (const auto& text : kComplexCompositions)
        for (const auto& var : kComplexVars) {
            INFO(text << " wrt " << var);
            CHECK(conj_pair_structure(text, var));
            CHECK(conj_pair_error(text, var, rng, 200) <= 1e-12);
        }
}

namespace {

class ComplexExprGen {
  public:
    explicit ComplexExprGen(unsigned seed) : rng_(seed) {}
    Expr make(int depth) {
        int pick = depth <= 0 ? pick_int(0, 2) : pick_int(0, 9);
        static const char* names[] = {"v1", "v2", "p", "r"};
        switch (pick) {
            case 0: return make_identifier(names[pick_int(0, 3)]);
            case 1: return make_constant(Value::real(pick_int(1, 40) / 4.0));
            case 2: return make_constant(Value::complex({pick_int(-8, 8) / 4.0, pick_int(1, 8) / 4.0}));
            case 3: return make_negate(make(depth - 1));
            case 4: return make_binary(NodeKind::Add, make(depth - 1), make(depth - 1));
            case 5: return make_binary(NodeKind::Subtract, make(depth - 1), make(depth - 1));
            case 6: return make_binary(NodeKind::Multiply, make(depth - 1), make(depth - 1));
            case 7: return make_binary(NodeKind::Divide, make(depth - 1), make(depth - 1));
            case 8: return make_conj(make(depth - 1));
            default: return make_call(pick_int(0, 1) ? Function::Sin : Function::Exp, {make(depth - 1)});
        }
    }

  private:
    int pick_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::mt19937 rng_;
};

bool conj_only_on_identifiers(const Expr& e) {
    if (e->kind == NodeKind::Conjugate && e->args[0]->kind != NodeKind::Identifier) return false;
    for (const auto& a : e->args)
        if (!conj_only_on_identifiers(a)) return false;
    return true;
}

}  // namespace

TEST_CASE("property: normalize_conj is idempotent and pushes conj to atoms", "[property][conj]") {
    ComplexExprGen gen(20240612);
    std::mt19937_64 rng(7004);
    for (int k = 0; k < 500; ++k) {
        Expr e = gen.make(4);
        Expr n = normalize_conj(e, kIsReal);
        CHECK(normalize_conj(n, kIsReal) == n);
        CHECK(conj_only_on_identifiers(n));
        CHECK_FALSE(textual_occurs(print_expr(n), "r", true));
        ComplexPoint pt(rng);
        pt.env.define("p", Value::complex({0.7, -0.4}), ValueType::Complex, false);
        try {
            Complex a = evaluate(e, pt.env).z;
            Complex b = evaluate(n, pt.env).z;
            if (std::isfinite(std::abs(a))) CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
        } catch (const EvalError&) {
            // division by an exact zero in a random tree
        }
    }
}

TEST_CASE("property: Jacobian pattern equals the occurrence pattern", "[property][structure]") {
    ComplexExprGen gen(20240613);
    for (int k = 0; k < 500; ++k) {
        Expr n = normalize_conj(gen.make(4), kIsReal);
        std::string text = print_expr(n);
        for (const char* var : {"v1", "v2"}) {
            for (bool c : {false, true}) {
                INFO(text);
                CHECK(occurs_wirtinger(n, var, c) == textual_occurs(text, var, c));
            }
        }
    }
}

TEST_CASE("property: simplify preserves the value of every example equation", "[property]") {
    for (int n = 1; n <= 8; ++n) {
        ModelDocument doc = test::load_example(n);
        ModelSettings s = resolve_settings(doc);
        Rng rng(1);
        Env env(s.domain, nullptr, &rng);
        declare_model(doc, env);
        for (GroupKind kind : {GroupKind::NLEs, GroupKind::WLSEs, GroupKind::ECs}) {
            std::function<void(const std::vector<Statement>&)> walk = [&](const std::vector<Statement>& body) {
                for (const auto& st : body) {
                    if (const auto* eq = std::get_if<EquationStmt>(&st.node)) {
                        Expr e = eq->rhs ? make_binary(NodeKind::Subtract, eq->lhs, *eq->rhs) : eq->lhs;
                        Complex a = evaluate(e, env).z;
                        Complex b = evaluate(simplify(e), env).z;
                        INFO("example " << n << ": " << print_expr(e));
                        CHECK(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)));
                    } else if (const auto* i = std::get_if<IfStmt>(&st.node)) {
                        walk(i->then_body);
                        walk(i->else_body);
                    } else if (const auto* s = std::get_if<SwitchStmt>(&st.node)) {
                        for (const auto& c : s->cases) walk(c.body);
                    }
                }
            };
            for (const Group* g : doc.groups_of(kind)) walk(g->statements);
        }
    }
}
