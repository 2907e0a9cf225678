#include "symgrid/parser.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "symgrid/lexer.hpp"

namespace symgrid {

namespace {

enum class BodyMode { Declaration, Distribution, Equation, Assignment };

BodyMode mode_for(GroupKind kind) {
    switch (kind) {
        case GroupKind::Vars:
        case GroupKind::Params: return BodyMode::Declaration;
        case GroupKind::Distributions: return BodyMode::Distribution;
        case GroupKind::NLEs:
        case GroupKind::WLSEs:
        case GroupKind::ECs: return BodyMode::Equation;
        default: return BodyMode::Assignment;
    }
}

double parse_number(const Token& t) {
    double value = 0.0;
    const char* first = t.lexeme.data();
    const char* last = first + t.lexeme.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError(t.loc, "invalid number '" + t.lexeme + "'");
    return value;
}

class Parser {
  public:
    explicit Parser(std::string_view source) : tokens_(tokenize(source)) {
        SourceLoc end_loc = tokens_.empty() ? SourceLoc{1, 1} : tokens_.back().loc;
        tokens_.push_back(Token{TokenKind::EndOfInput, "", end_loc});
    }

    Expr expression_only() {
        skip_separators();
        Expr e = expression();
        skip_separators();
        if (!at_end()) fail("unexpected '" + peek().lexeme + "' after expression");
        return e;
    }

    ModelDocument model() {
        ModelDocument doc;
        skip_separators();
        if (!peek().is_keyword("Header")) fail("missing Header (a model file must start with 'Header:')");
        doc.header.loc = next().loc;
        doc.header.attrs = optional_attributes();
        expect_punct(":");
        header_body(doc.header);

        skip_separators();
        if (!peek().is_keyword("Model")) fail("expected 'Model' after the header");
        doc.model.loc = next().loc;
        doc.model.attrs = optional_attributes();
        expect_punct(":");
        model_type_ = doc.model.attrs.text("type").value_or("NL");
        body(doc, false);
        return doc;
    }

  private:
    // ---- token access --------------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokenKind::EndOfInput; }
    bool at_separator() const { return peek().kind == TokenKind::Separator; }

    void skip_separators() {
        while (at_separator()) next();
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(peek().loc, message); }

    void expect_punct(std::string_view p) {
        if (!peek().is_punct(p)) fail("expected '" + std::string(p) + "', found " + describe(peek()));
        next();
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::EndOfInput: return "end of input";
            case TokenKind::Separator: return "end of statement";
            case TokenKind::String: return "string \"" + t.lexeme + "\"";
            default: return "'" + t.lexeme + "'";
        }
    }

    void end_of_statement() {
        if (at_separator()) {
            skip_separators();
            return;
        }
        if (at_end()) return;
        const Token& t = peek();
        if (t.is_keyword("end") || t.is_keyword("case") || t.is_keyword("default") || t.is_keyword("else") ||
            t.is_keyword("group"))
            return;
        if (t.kind == TokenKind::Keyword && section_kind(t.lexeme)) return;
        fail("unexpected " + describe(t) + " at end of statement");
    }

    // True if the keyword at the cursor starts a group header rather than a misused name.
    bool keyword_starts_group() const {
        const Token& t = peek();
        if (t.kind != TokenKind::Keyword) return false;
        if (peek(1).is_op("=")) return false;
        if (!peek(1).is_punct("[")) return true;
        std::size_t k = 1;
        int depth = 0;
        for (;; ++k) {
            const Token& u = peek(k);
            if (u.kind == TokenKind::EndOfInput) return true;
            if (u.is_punct("[")) ++depth;
            if (u.is_punct("]") && --depth == 0) break;
        }
        return peek(k + 1).is_punct(":");
    }

    bool at_block_end() const {
        if (at_end()) return true;
        const Token& t = peek();
        if (t.kind != TokenKind::Keyword) return false;
        if (!keyword_starts_group()) return false;
        return t.lexeme == "end" || t.lexeme == "group" || t.lexeme == "SubModel" || section_kind(t.lexeme);
    }

    // ---- attributes ----------------------------------------------------------------

    AttributeList optional_attributes() {
        AttributeList list;
        while (peek().is_punct("[")) {
            next();
            while (!peek().is_punct("]")) {
                if (at_end()) fail("unterminated attribute list");
                list.items.push_back(attribute());
                if (peek().is_punct(",")) next();
            }
            next();
        }
        return list;
    }

    Attribute attribute() {
        Attribute a;
        const Token& name = peek();
        if (name.kind != TokenKind::Identifier && name.kind != TokenKind::Keyword)
            fail("expected attribute name, found " + describe(name));
        a.loc = name.loc;
        a.name = next().lexeme;
        if (!peek().is_op("=")) fail("attribute '" + a.name + "' must be given a value");
        next();
        a.value = attribute_value();
        return a;
    }

    AttrValue attribute_value() {
        AttrValue v;
        const Token& t = peek();
        if (t.is_op("-") && peek(1).kind == TokenKind::Number) {
            next();
            v.kind = AttrValue::Kind::Number;
            v.number = -parse_number(next());
            return v;
        }
        switch (t.kind) {
            case TokenKind::Number:
                v.kind = AttrValue::Kind::Number;
                v.number = parse_number(next());
                return v;
            case TokenKind::String:
                v.kind = AttrValue::Kind::String;
                v.text = next().lexeme;
                return v;
            case TokenKind::Identifier:
                v.kind = AttrValue::Kind::Word;
                v.text = next().lexeme;
                return v;
            case TokenKind::Keyword:
                if (t.lexeme == "true" || t.lexeme == "false") {
                    v.kind = AttrValue::Kind::Boolean;
                    v.flag = next().lexeme == "true";
                    return v;
                }
                v.kind = AttrValue::Kind::Word;
                v.text = next().lexeme;
                return v;
            default: fail("expected attribute value, found " + describe(t));
        }
    }

    // ---- structure -----------------------------------------------------------------

    void header_body(Group& header) {
        for (;;) {
            skip_separators();
            if (at_end()) fail("missing 'end' for Header");
            if (peek().is_keyword("end")) {
                next();
                return;
            }
            header.attrs.items.push_back(attribute());
            end_of_statement();
        }
    }

    void check_legal(GroupKind kind, bool in_submodel, const Token& at) const {
        bool wls = model_type_ == "WLS";
        auto illegal = [&](const std::string& why) { throw ParseError(at.loc, why); };
        switch (kind) {
            case GroupKind::NLEs:
                if (wls) illegal("NLEs group is not allowed in a WLS model (use WLSEs)");
                break;
            case GroupKind::WLSEs:
            case GroupKind::ECs:
                if (!wls) illegal(std::string(to_string(kind)) + " group is only allowed in a WLS model");
                break;
            default: break;
        }
        (void)in_submodel;
    }

    void body(ModelDocument& doc, bool submodel) {
        for (;;) {
            skip_separators();
            if (at_end()) fail(submodel ? "missing 'end' for SubModel" : "missing 'end' for Model");
            const Token& t = peek();
            if (t.is_keyword("end")) {
                next();
                if (submodel) return;
                skip_separators();
                if (at_end()) return;
                if (peek().kind == TokenKind::Keyword && (section_kind(peek().lexeme) || peek().lexeme == "SubModel"))
                    continue;  // redundant group terminator
                fail("unexpected " + describe(peek()) + " after the model's 'end'");
            }
            if (t.is_keyword("SubModel")) {
                if (submodel) fail("a SubModel cannot be nested inside another SubModel");
                submodel_block(doc);
                continue;
            }
            if (t.kind == TokenKind::Keyword) {
                if (auto kind = section_kind(t.lexeme)) {
                    group(doc, *kind, submodel);
                    continue;
                }
                if (t.lexeme == "group") fail("'group' is only allowed inside Limits");
            }
            fail("expected a group keyword, found " + describe(t));
        }
    }

    void submodel_block(ModelDocument& parent) {
        ModelDocument sub;
        sub.header.attrs = {};
        sub.model.kind = GroupKind::SubModel;
        sub.model.loc = next().loc;
        sub.model.attrs = optional_attributes();
        expect_punct(":");
        std::string saved = model_type_;
        model_type_ = sub.model.attrs.text("type").value_or("NL");
        body(sub, true);
        model_type_ = saved;
        parent.submodels.push_back(std::move(sub));
    }

    void group(ModelDocument& doc, GroupKind kind, bool submodel) {
        const Token& head = peek();
        check_legal(kind, submodel, head);
        Group g;
        g.kind = kind;
        g.loc = next().loc;
        g.attrs = optional_attributes();
        expect_punct(":");
        BodyMode mode = mode_for(kind);
        for (;;) {
            skip_separators();
            if (kind == GroupKind::Limits && peek().is_keyword("group") && keyword_starts_group()) {
                g.subgroups.push_back(limit_group());
                continue;
            }
            if (at_block_end()) break;
            g.statements.push_back(statement(mode, kind));
        }
        doc.groups.push_back(std::move(g));
    }

    Group limit_group() {
        Group g;
        g.kind = GroupKind::LimitGroup;
        g.loc = next().loc;
        g.attrs = optional_attributes();
        expect_punct(":");
        for (;;) {
            skip_separators();
            if (peek().is_keyword("end") && keyword_starts_group()) {
                next();
                break;
            }
            if (at_block_end()) break;  // implicit end at the next group or section
            g.statements.push_back(statement(BodyMode::Assignment, GroupKind::LimitGroup));
        }
        return g;
    }

    // ---- statements ----------------------------------------------------------------

    std::vector<Statement> block(BodyMode mode, GroupKind kind, bool stop_at_else, bool stop_at_case) {
        std::vector<Statement> out;
        for (;;) {
            skip_separators();
            const Token& t = peek();
            if (at_end()) fail("missing 'end' for conditional block");
            if (t.is_keyword("end") && keyword_starts_group()) break;
            if (stop_at_else && t.is_keyword("else")) break;
            if (stop_at_case && (t.is_keyword("case") || t.is_keyword("default"))) break;
            if (t.kind == TokenKind::Keyword && keyword_starts_group() && t.lexeme != "end" &&
                (section_kind(t.lexeme) || t.lexeme == "group" || t.lexeme == "SubModel"))
                fail("missing 'end' for conditional block");
            out.push_back(statement(mode, kind));
        }
        return out;
    }

    Statement statement(BodyMode mode, GroupKind kind) {
        const Token& t = peek();
        if (mode == BodyMode::Equation || mode == BodyMode::Assignment) {
            if (t.is_keyword("if")) return Statement{if_statement(mode, kind)};
            if (t.is_keyword("switch")) return Statement{switch_statement(mode, kind)};
        }
        switch (mode) {
            case BodyMode::Declaration: return Statement{declaration()};
            case BodyMode::Distribution: return Statement{distribution()};
            case BodyMode::Equation: return Statement{equation()};
            case BodyMode::Assignment:
                if (t.is_keyword("repeat")) {
                    RepeatMarker r{next().loc};
                    end_of_statement();
                    return Statement{r};
                }
                return Statement{assignment()};
        }
        fail("unreachable");
    }

    IfStmt if_statement(BodyMode mode, GroupKind kind) {
        IfStmt s;
        s.loc = next().loc;
        s.guard = expression();
        s.guard_attrs = optional_attributes();
        expect_punct(":");
        s.then_body = block(mode, kind, true, false);
        if (peek().is_keyword("else")) {
            next();
            s.has_else = true;
            if (peek().is_keyword("if")) fail("'else if' is not supported; nest an 'if' inside 'else:'");
            s.else_attrs = optional_attributes();
            expect_punct(":");
            s.else_body = block(mode, kind, false, false);
        }
        if (!peek().is_keyword("end")) fail("missing 'end' for if");
        next();
        end_of_statement();
        return s;
    }

    SwitchStmt switch_statement(BodyMode mode, GroupKind kind) {
        SwitchStmt s;
        s.loc = next().loc;
        expect_punct(":");
        for (;;) {
            skip_separators();
            const Token& t = peek();
            if (t.is_keyword("end")) {
                next();
                break;
            }
            SwitchCase c;
            c.loc = t.loc;
            if (t.is_keyword("case")) {
                next();
                c.guard = expression();
            } else if (t.is_keyword("default")) {
                next();
            } else {
                fail("expected 'case', 'default' or 'end' in switch, found " + describe(t));
            }
            c.attrs = optional_attributes();
            if (!peek().is_op("->")) fail("expected '->' after switch case");
            next();
            c.body = block(mode, kind, false, true);
            s.cases.push_back(std::move(c));
        }
        if (s.cases.empty()) throw ParseError(s.loc, "switch without cases");
        end_of_statement();
        return s;
    }

    Declaration declaration() {
        Declaration d;
        d.attrs = optional_attributes();
        const Token& t = peek();
        if (t.kind != TokenKind::Identifier && t.kind != TokenKind::Keyword)
            fail("expected a name, found " + describe(t));
        d.loc = t.loc;
        d.name = next().lexeme;
        if (peek().is_op("=")) {
            next();
            d.init = expression();
        }
        append(d.attrs, optional_attributes());
        end_of_statement();
        return d;
    }

    DistDecl distribution() {
        DistDecl d;
        const Token& t = peek();
        if (t.kind != TokenKind::Identifier && t.kind != TokenKind::Keyword)
            fail("expected a distribution name, found " + describe(t));
        d.loc = t.loc;
        d.name = next().lexeme;
        d.attrs = optional_attributes();
        end_of_statement();
        return d;
    }

    EquationStmt equation() {
        EquationStmt e;
        e.loc = peek().loc;
        e.attrs = optional_attributes();
        e.lhs = expression();
        if (peek().is_op("=")) {
            next();
            e.rhs = expression();
        }
        if (peek().is_op("=")) fail("an equation may contain at most one '='");
        append(e.attrs, optional_attributes());
        end_of_statement();
        return e;
    }

    AssignStmt assignment() {
        AssignStmt a;
        a.loc = peek().loc;
        if (peek().is_punct("@")) {
            next();
            if (!(peek().kind == TokenKind::Identifier && peek().lexeme == "main"))
                fail("expected 'main' after '@'");
            next();
            expect_punct(".");
            a.target.main_scope = true;
        }
        const Token& name = peek();
        if (name.kind != TokenKind::Identifier) fail("expected an assignment target, found " + describe(name));
        a.target.name = next().lexeme;
        if (peek().is_punct(".")) {
            next();
            const Token& comp = peek();
            if (comp.kind == TokenKind::Identifier && comp.lexeme == "real")
                a.target.component = Component::Real;
            else if (comp.kind == TokenKind::Identifier && comp.lexeme == "imag")
                a.target.component = Component::Imag;
            else
                fail("expected 'real' or 'imag' after '.'");
            next();
        }
        const Token& op = peek();
        if (op.is_op("="))
            a.op = AssignOp::Set;
        else if (op.is_op("+="))
            a.op = AssignOp::Add;
        else if (op.is_op("-="))
            a.op = AssignOp::Subtract;
        else if (op.is_op("*="))
            a.op = AssignOp::Multiply;
        else if (op.is_op("/="))
            a.op = AssignOp::Divide;
        else if (op.is_op("^="))
            a.op = AssignOp::Power;
        else
            fail("expected an assignment operator, found " + describe(op));
        next();
        a.value = expression();
        end_of_statement();
        return a;
    }

    static void append(AttributeList& into, AttributeList more) {
        for (auto& a : more.items) into.items.push_back(std::move(a));
    }

    // ---- expressions ---------------------------------------------------------------

    Expr expression() {
        Expr lhs = additive();
        const Token& t = peek();
        NodeKind kind;
        if (t.is_op("<"))
            kind = NodeKind::Less;
        else if (t.is_op("<="))
            kind = NodeKind::LessEqual;
        else if (t.is_op(">"))
            kind = NodeKind::Greater;
        else if (t.is_op(">="))
            kind = NodeKind::GreaterEqual;
        else
            return lhs;
        next();
        Expr rhs = additive();
        if (peek().is_op("<") || peek().is_op("<=") || peek().is_op(">") || peek().is_op(">="))
            fail("comparisons cannot be chained");
        return make_binary(kind, std::move(lhs), std::move(rhs));
    }

    Expr additive() {
        Expr lhs = unary();
        for (;;) {
            if (peek().is_op("+")) {
                next();
                lhs = make_binary(NodeKind::Add, std::move(lhs), unary());
            } else if (peek().is_op("-")) {
                next();
                lhs = make_binary(NodeKind::Subtract, std::move(lhs), unary());
            } else {
                return lhs;
            }
        }
    }

    // A leading minus applies to the whole product that follows it.
    Expr unary() {
        if (peek().is_op("-")) {
            next();
            return make_negate(unary());
        }
        return multiplicative();
    }

    Expr multiplicative() {
        Expr lhs = factor();
        for (;;) {
            if (peek().is_op("*")) {
                next();
                lhs = make_binary(NodeKind::Multiply, std::move(lhs), factor());
            } else if (peek().is_op("/")) {
                next();
                lhs = make_binary(NodeKind::Divide, std::move(lhs), factor());
            } else {
                return lhs;
            }
        }
    }

    Expr factor() {
        if (peek().is_op("-")) {
            next();
            return make_negate(factor());
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!peek().is_op("^")) return base;
        next();
        return make_binary(NodeKind::Power, std::move(base), factor());
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number: return make_constant(Value::real(parse_number(next())));
            case TokenKind::ImaginaryNumber: return make_constant(Value::complex({0.0, parse_number(next())}));
            case TokenKind::Keyword:
                if (t.lexeme == "true" || t.lexeme == "false")
                    return make_constant(Value::boolean(next().lexeme == "true"));
                fail("reserved word '" + t.lexeme + "' cannot be used in an expression");
            case TokenKind::Identifier: {
                if (peek(1).is_punct("(")) return call();
                if (is_builtin_constant(t.lexeme)) return make_named_constant(next().lexeme);
                if (is_builtin_function(t.lexeme)) fail("function '" + t.lexeme + "' must be called with arguments");
                return make_identifier(next().lexeme);
            }
            case TokenKind::Punctuation:
                if (t.is_punct("(")) {
                    next();
                    Expr inner = expression();
                    if (!peek().is_punct(")")) fail("unbalanced parentheses: expected ')', found " + describe(peek()));
                    next();
                    return inner;
                }
                break;
            default: break;
        }
        fail("expected an expression, found " + describe(t));
    }

    Expr call() {
        const Token& name = next();
        next();  // (
        std::vector<Expr> args;
        if (!peek().is_punct(")")) {
            for (;;) {
                args.push_back(expression());
                if (peek().is_punct(",")) {
                    next();
                    continue;
                }
                break;
            }
        }
        if (!peek().is_punct(")")) fail("unbalanced parentheses: expected ')', found " + describe(peek()));
        next();
        if (name.lexeme == "conj") {
            if (args.size() != 1) throw ParseError(name.loc, "conj expects 1 argument");
            return make_conj(std::move(args[0]));
        }
        auto f = find_function(name.lexeme);
        if (!f) throw ParseError(name.loc, "unknown function '" + name.lexeme + "'");
        const FunctionInfo& info = function_info(*f);
        if (static_cast<int>(args.size()) != info.arity)
            throw ParseError(name.loc, std::string(info.name) + " expects " + std::to_string(info.arity) +
                                           " argument(s), got " + std::to_string(args.size()));
        if (*f == Function::Rnd && args[0]->kind != NodeKind::Identifier)
            throw ParseError(name.loc, "rnd expects a distribution name");
        return make_call(*f, std::move(args));
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::string model_type_ = "NL";
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).expression_only(); }

ModelDocument parse_model(std::string_view source) { return Parser(source).model(); }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelDocument parse_model_file(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

}  // namespace symgrid
