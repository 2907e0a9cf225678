#include "symgrid/printer.hpp"

#include <fmt/format.h>

#include <cmath>

namespace symgrid {

namespace {

enum Prec { kCmp = 1, kAdd = 2, kNeg = 3, kMul = 4, kPow = 5, kPrimary = 6 };

int precedence(const Expr& e) {
    switch (e->kind) {
        case NodeKind::Less:
        case NodeKind::LessEqual:
        case NodeKind::Greater:
        case NodeKind::GreaterEqual: return kCmp;
        case NodeKind::Add:
        case NodeKind::Subtract: return kAdd;
        case NodeKind::Negate: return kNeg;
        case NodeKind::Multiply:
        case NodeKind::Divide: return kMul;
        case NodeKind::Power: return kPow;
        case NodeKind::Constant: {
            if (!e->name.empty() || e->value.is_bool()) return kPrimary;
            Complex z = e->value.z;
            if (z.real() != 0.0 && z.imag() != 0.0) return kAdd;
            if (std::signbit(z.real()) || std::signbit(z.imag())) return kNeg;
            return kPrimary;
        }
        default: return kPrimary;
    }
}

std::string constant_text(const Node& n) {
    if (!n.name.empty()) return n.name;
    const Value& v = n.value;
    if (v.is_bool()) return v.z.real() != 0.0 ? "true" : "false";
    if (v.type != ValueType::Complex) return format_number(v.z.real());
    double re = v.z.real();
    double im = v.z.imag();
    if (re == 0.0 && !std::signbit(re)) return format_number(im) + "i";
    if (im == 0.0 && !std::signbit(im)) return format_number(re) + "+0i";
    return format_number(re) + (std::signbit(im) ? "-" : "+") + format_number(std::abs(im)) + "i";
}

std::string wrap(const Expr& e, int min_prec) {
    std::string s = print_expr(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

const char* op_text(NodeKind k) {
    switch (k) {
        case NodeKind::Add: return " + ";
        case NodeKind::Subtract: return " - ";
        case NodeKind::Multiply: return "*";
        case NodeKind::Divide: return "/";
        case NodeKind::Power: return "^";
        case NodeKind::Less: return " < ";
        case NodeKind::LessEqual: return " <= ";
        case NodeKind::Greater: return " > ";
        case NodeKind::GreaterEqual: return " >= ";
        default: return "?";
    }
}

std::string attr_value_text(const AttrValue& v) {
    switch (v.kind) {
        case AttrValue::Kind::Number: return format_number(v.number);
        case AttrValue::Kind::String: return "\"" + v.text + "\"";
        case AttrValue::Kind::Word: return v.text;
        case AttrValue::Kind::Boolean: return v.flag ? "true" : "false";
    }
    return {};
}

class DocPrinter {
  public:
    std::string run(const ModelDocument& doc) {
        out_ += "Header" + suffix(doc.header.attrs, false) + ":\n";
        for (const auto& a : doc.header.attrs.items) line(1, a.name + " = " + attr_value_text(a.value));
        out_ += "end\n";
        model(doc, "Model");
        return std::move(out_);
    }

  private:
    // Header attributes are printed as body lines, never inline.
    static std::string suffix(const AttributeList& attrs, bool inline_attrs = true) {
        if (!inline_attrs || attrs.empty()) return {};
        return " " + print_attributes(attrs);
    }

    void line(int depth, const std::string& text) {
        out_.append(static_cast<std::size_t>(depth) * 4, ' ');
        out_ += text;
        out_ += '\n';
    }

    void model(const ModelDocument& doc, const char* keyword) {
        out_ += keyword + suffix(doc.model.attrs) + ":\n";
        for (const auto& g : doc.groups) group(g, 0);
        for (const auto& sub : doc.submodels) model(sub, "SubModel");
        out_ += "end\n";
    }

    void group(const Group& g, int depth) {
        line(depth, std::string(to_string(g.kind)) + suffix(g.attrs) + ":");
        for (const auto& s : g.statements) statement(s, depth + 1);
        for (const auto& sub : g.subgroups) group(sub, depth + 1);
        if (g.kind == GroupKind::LimitGroup) line(depth, "end");
    }

    void body(const std::vector<Statement>& stmts, int depth) {
        for (const auto& s : stmts) statement(s, depth);
    }

    void statement(const Statement& s, int depth) {
        std::visit([&](const auto& node) { emit(node, depth); }, s.node);
    }

    void emit(const EquationStmt& e, int depth) {
        std::string text = e.attrs.empty() ? std::string{} : print_attributes(e.attrs) + " ";
        text += print_expr(e.lhs);
        if (e.rhs) text += " = " + print_expr(*e.rhs);
        line(depth, text);
    }

    void emit(const AssignStmt& a, int depth) {
        line(depth, print_assign_target(a.target) + " " + std::string(to_string(a.op)) + " " + print_expr(a.value));
    }

    void emit(const Declaration& d, int depth) {
        std::string text = d.name;
        if (d.init) text += " = " + print_expr(*d.init);
        line(depth, text + suffix(d.attrs));
    }

    void emit(const DistDecl& d, int depth) { line(depth, d.name + suffix(d.attrs)); }

    void emit(const IfStmt& s, int depth) {
        line(depth, "if " + print_expr(s.guard) + suffix(s.guard_attrs) + ":");
        body(s.then_body, depth + 1);
        if (s.has_else) {
            line(depth, "else" + suffix(s.else_attrs) + ":");
            body(s.else_body, depth + 1);
        }
        line(depth, "end");
    }

    void emit(const SwitchStmt& s, int depth) {
        line(depth, "switch:");
        for (const auto& c : s.cases) {
            std::string head = c.guard ? "case " + print_expr(*c.guard) : std::string("default");
            line(depth + 1, head + suffix(c.attrs) + " ->");
            body(c.body, depth + 2);
        }
        line(depth, "end");
    }

    void emit(const RepeatMarker&, int depth) { line(depth, "repeat"); }

    std::string out_;
};

}  // namespace

std::string format_number(double x) { return fmt::format("{}", x); }

std::string print_expr(const Expr& e) {
    const Node& n = *e;
    switch (n.kind) {
        case NodeKind::Constant: return constant_text(n);
        case NodeKind::Identifier: return n.name;
        case NodeKind::Negate: {
            // The operand of a leading minus may be a full product.
            const Expr& a = n.args[0];
            int p = precedence(a);
            bool paren = p < kMul || (a->kind == NodeKind::Constant && p != kPrimary);
            return "-" + (paren ? "(" + print_expr(a) + ")" : print_expr(a));
        }
        case NodeKind::Add:
        case NodeKind::Subtract:
            return wrap(n.args[0], kAdd) + op_text(n.kind) + wrap(n.args[1], kMul);
        case NodeKind::Multiply:
        case NodeKind::Divide:
            return wrap(n.args[0], kMul) + op_text(n.kind) + wrap(n.args[1], kPow);
        case NodeKind::Power: return wrap(n.args[0], kPrimary) + "^" + wrap(n.args[1], kPow);
        case NodeKind::Less:
        case NodeKind::LessEqual:
        case NodeKind::Greater:
        case NodeKind::GreaterEqual:
            return wrap(n.args[0], kAdd) + op_text(n.kind) + wrap(n.args[1], kAdd);
        case NodeKind::Call: {
            std::string s(function_info(n.function).name);
            s += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) s += ", ";
                s += print_expr(n.args[i]);
            }
            return s + ")";
        }
        case NodeKind::Conjugate: return "conj(" + print_expr(n.args[0]) + ")";
    }
    return "?";
}

std::string print_attributes(const AttributeList& attrs) {
    std::string s = "[";
    for (std::size_t i = 0; i < attrs.items.size(); ++i) {
        if (i) s += " ";
        s += attrs.items[i].name + "=" + attr_value_text(attrs.items[i].value);
    }
    return s + "]";
}

std::string print_assign_target(const AssignTarget& t) {
    std::string s = t.main_scope ? "@main." + t.name : t.name;
    if (t.component == Component::Real) s += ".real";
    if (t.component == Component::Imag) s += ".imag";
    return s;
}

std::string print_document(const ModelDocument& doc) { return DocPrinter().run(doc); }

}  // namespace symgrid
