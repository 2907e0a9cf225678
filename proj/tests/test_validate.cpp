#include <catch_amalgamated.hpp>

#include "symgrid/parser.hpp"
#include "symgrid/validate.hpp"
#include "test_support.hpp"

using namespace symgrid;

namespace {

std::vector<Diagnostic> check(const std::string& body, const std::string& model_attrs = "type=NL domain=real") {
    return validate_document(parse_model("Header:\nend\nModel [" + model_attrs + "]:\n" + body + "end\n"));
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& text, Severity sev = Severity::Error) {
    for (const auto& d : ds)
        if (d.severity == sev && d.message.find(text) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("every bundled example validates without diagnostics", "[validate]") {
    for (int n = 1; n <= 8; ++n) {
        auto ds = validate_document(test::load_example(n));
        INFO("example " << n);
        for (const auto& d : ds) INFO(format_diagnostic(d));
        CHECK(ds.empty());
    }
}

TEST_CASE("reserved word as a variable name", "[validate]") {
    auto ds = check("Vars: end=1; x=1\nNLEs: x=1\n");
    CHECK(mentions(ds, "reserved word"));
    CHECK(mentions(check("Vars: NLEs=1; x=1\nNLEs: x=1\n"), "reserved word"));
}

TEST_CASE("default must be the last case", "[validate]") {
    auto ds = check(
        "Vars: x=1\nParams: c=true\nNLEs:\n    switch:\n        default -> x=1\n        case c -> x=2\n    end\n");
    REQUIRE(has_errors(ds));
    CHECK(mentions(ds, "'default' must be the last case"));
    CHECK(ds.front().loc.line == 8);
}

TEST_CASE("equation count must match unknowns", "[validate]") {
    CHECK(mentions(check("Vars: x=1; y=1\nNLEs: x=1\n"), "1 equations for 2 unknowns"));
    CHECK(mentions(check("Vars: v=1\nNLEs: v=1\n", "type=NL domain=cmplx"), "1 equations for 2 unknowns"));
    CHECK_FALSE(has_errors(check("Vars: v=1\nNLEs: v=1; conj(v)=1\n", "type=NL domain=cmplx")));
}

TEST_CASE("conditional arms must agree", "[validate]") {
    auto ds = check("Vars: x=1\nParams: c=true\nNLEs:\n    if c:\n        x=1\n    else:\n        x=1; x=2\n    end\n");
    CHECK(mentions(ds, "different numbers of equations"));
}

TEST_CASE("variables shadowing parameters are flagged", "[validate]") {
    auto ds = check("Params: x=2\nVars: x=1\nNLEs: x=1\n");
    CHECK(mentions(ds, "shadows a parameter", Severity::Warning));
}

TEST_CASE("attribute names may be used as identifiers", "[validate]") {
    auto ds = check("Vars: w=1\nParams: eps=2; out=3; signal=1\nNLEs: w=eps*out*signal\n");
    CHECK_FALSE(has_errors(ds));
}

TEST_CASE("semantic errors are all collected", "[validate]") {
    auto ds = check("Vars: x=1\nNLEs: x=y + round(x, 0)\nPostProc: repeat\n");
    CHECK(mentions(ds, "undeclared identifier 'y'"));
    CHECK(mentions(ds, "only be used in assignments"));
    CHECK(mentions(ds, "'repeat' is only allowed"));
}

TEST_CASE("weights and main-scope targets", "[validate]") {
    auto wls = check("Vars: x=1\nWLSEs: x=1\nPostProc: @main.x=1\n", "type=WLS domain=real");
    CHECK(mentions(wls, "needs a weight"));
    CHECK(mentions(wls, "only allowed inside a SubModel"));
    CHECK(mentions(check("Vars: x=1\nWLSEs: [w=-1] x=1\n", "type=WLS domain=real"), "weight must be positive"));
    CHECK(mentions(check("Vars: x=1\nParams: p=1\nNLEs: x=1\nPostProc: p.imag=2\n"), "'.imag' selector"));
}

TEST_CASE("missing variable initializers draw a warning", "[validate]") {
    auto ds = check("Vars: x\nNLEs: x=1\n");
    CHECK_FALSE(has_errors(ds));
    CHECK(mentions(ds, "no initial value", Severity::Warning));
}

TEST_CASE("forward parameter references are errors", "[validate]") {
    CHECK(mentions(check("Vars: x=1\nParams: a=b; b=1\nNLEs: x=a\n"), "undeclared identifier 'b'"));
}
