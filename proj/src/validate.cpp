#include "symgrid/validate.hpp"

#include <map>
#include <set>
#include <string>

#include "symgrid/env.hpp"
#include "symgrid/lexer.hpp"

namespace symgrid {

namespace {

enum class NameKind { Param, Var };

struct Scope {
    std::map<std::string, NameKind, std::less<>> names;
    std::map<std::string, ValueType, std::less<>> types;
    std::set<std::string, std::less<>> distributions;
};

bool contains_non_smooth(const Expr& e) {
    if (e->kind == NodeKind::Call && !function_info(e->function).smooth) return true;
    for (const auto& a : e->args)
        if (contains_non_smooth(a)) return true;
    return false;
}

void collect_rnd(const Expr& e, std::vector<std::string>& out) {
    if (e->kind == NodeKind::Call && e->function == Function::Rnd) {
        out.push_back(e->args[0]->name);
        return;
    }
    for (const auto& a : e->args) collect_rnd(a, out);
}

class Validator {
  public:
    std::vector<Diagnostic> run(const ModelDocument& doc) {
        check_header(doc.header);
        model(doc, nullptr, nullptr);
        return std::move(out_);
    }

  private:
    void error(SourceLoc loc, std::string msg) { out_.push_back({Severity::Error, loc, std::move(msg)}); }
    void warning(SourceLoc loc, std::string msg) { out_.push_back({Severity::Warning, loc, std::move(msg)}); }

    void check_header(const Group& header) {
        static const std::set<std::string> known{"maxIter", "maxReps", "report"};
        for (const auto& a : header.attrs.items) {
            if (!known.count(a.name)) warning(a.loc, "unknown header setting '" + a.name + "'");
        }
        check_positive(header.attrs, "maxIter");
        check_positive(header.attrs, "maxReps");
        if (const Attribute* r = header.attrs.find("report")) {
            if (!parse_report_level(r->value.text))
                error(r->loc, "report must be Solved, All or AllDetails");
        }
    }

    void check_positive(const AttributeList& attrs, std::string_view name) {
        const Attribute* a = attrs.find(name);
        if (!a) return;
        if (a->value.kind != AttrValue::Kind::Number || a->value.number <= 0)
            error(a->loc, std::string(name) + " must be a positive number");
    }

    void check_model_attrs(const Group& model) {
        const AttributeList& m = model.attrs;
        if (const Attribute* t = m.find("type"); t && t->value.text != "NL" && t->value.text != "WLS")
            error(t->loc, "model type must be NL or WLS");
        if (const Attribute* d = m.find("domain"); d && !parse_domain(d->value.text))
            error(d->loc, "domain must be real, cplx, cmplx or complex");
        if (const Attribute* e = m.find("eps");
            e && (e->value.kind != AttrValue::Kind::Number || e->value.number <= 0))
            error(e->loc, "eps must be a positive number");
        check_positive(m, "maxIter");
        check_positive(m, "maxReps");
        if (const Attribute* r = m.find("report"); r && !parse_report_level(r->value.text))
            error(r->loc, "report must be Solved, All or AllDetails");
    }

    ValueType declared_type(const Declaration& d, const AttributeList& group_attrs, Domain domain) {
        const Attribute* t = d.attrs.find("type");
        if (!t) t = group_attrs.find("type");
        if (t) {
            if (auto vt = parse_value_type(t->value.text)) return *vt;
            error(t->loc, "unknown type '" + t->value.text + "'");
        }
        if (d.init && (*d.init)->kind == NodeKind::Constant && (*d.init)->value.is_bool()) return ValueType::Bool;
        return domain == Domain::Complex ? ValueType::Complex : ValueType::Real;
    }

    void declare(Scope& scope, const Declaration& d, NameKind kind, ValueType type) {
        if (is_reserved_name(d.name)) {
            error(d.loc, "'" + d.name + "' is a reserved word and cannot be used as a name");
            return;
        }
        auto it = scope.names.find(d.name);
        if (it != scope.names.end()) {
            if (it->second == NameKind::Param && kind == NameKind::Var)
                warning(d.loc, "variable '" + d.name + "' shadows a parameter");
            else
                error(d.loc, "duplicate declaration of '" + d.name + "'");
        }
        scope.names[d.name] = kind;
        scope.types[d.name] = type;
    }

    void check_identifiers(const Expr& e, const Scope& scope, SourceLoc loc, const char* context) {
        for (const auto& name : collect_identifiers(e)) {
            if (!scope.names.count(name)) error(loc, "undeclared identifier '" + name + "' in " + context);
        }
        std::vector<std::string> dists;
        collect_rnd(e, dists);
        for (const auto& d : dists)
            if (!scope.distributions.count(d)) error(loc, "unknown distribution '" + d + "'");
    }

    void model(const ModelDocument& doc, const Scope* parent, const ModelSettings* parent_settings) {
        check_model_attrs(doc.model);
        ModelSettings settings = resolve_settings(doc, parent_settings);
        Scope scope;
        bool submodel = parent != nullptr;

        for (const Group* g : doc.groups_of(GroupKind::Distributions)) {
            for (const auto& st : g->statements) {
                const auto& d = std::get<DistDecl>(st.node);
                if (is_reserved_name(d.name)) error(d.loc, "'" + d.name + "' is a reserved word");
                if (auto t = d.attrs.text("type"); t && *t != "Gauss")
                    error(d.loc, "unsupported distribution type '" + *t + "'");
                for (const char* key : {"mean", "dev"}) {
                    const Attribute* a = d.attrs.find(key);
                    if (a && a->value.kind != AttrValue::Kind::Number)
                        error(a->loc, std::string(key) + " must be a number");
                }
                if (auto dev = d.attrs.number("dev"); dev && *dev < 0) error(d.loc, "dev must be non-negative");
                scope.distributions.insert(d.name);
            }
        }

        if (submodel) {
            int copied = 0;
            for (const auto& [name, kind] : parent_param_order_) {
                if (copied >= settings.copy_pars) break;
                scope.names[name] = NameKind::Param;
                scope.types[name] = kind;
                ++copied;
            }
            if (copied < settings.copy_pars)
                error(doc.model.loc, "copyPars exceeds the number of parent parameters");
        }

        // Parameters: strictly top to bottom.
        std::vector<std::pair<std::string, ValueType>> param_order;
        for (const Group* g : doc.groups_of(GroupKind::Params)) {
            for (const auto& st : g->statements) {
                const auto& d = std::get<Declaration>(st.node);
                ValueType t = declared_type(d, g->attrs, settings.domain);
                if (d.init) check_identifiers(*d.init, scope, d.loc, "parameter initializer");
                declare(scope, d, NameKind::Param, t);
                param_order.emplace_back(d.name, t);
            }
        }
        // Variables may reference any parameter or variable.
        std::vector<const Declaration*> vars;
        for (const Group* g : doc.groups_of(GroupKind::Vars)) {
            if (auto c = g->attrs.boolean("conj"); c && !*c && settings.domain == Domain::Complex)
                error(g->loc, "conj=false is not supported: complex unknowns are always paired with their conjugates");
            for (const auto& st : g->statements) {
                const auto& d = std::get<Declaration>(st.node);
                ValueType t = declared_type(d, g->attrs, settings.domain);
                if (t == ValueType::Bool || t == ValueType::Int)
                    error(d.loc, "variable '" + d.name + "' must be real or complex");
                declare(scope, d, NameKind::Var, t);
                vars.push_back(&d);
                if (!d.init)
                    warning(d.loc, "variable '" + d.name + "' has no initial value; explicit initialization is advised");
            }
        }
        for (const Declaration* d : vars)
            if (d->init) check_identifiers(*d->init, scope, d->loc, "variable initializer");

        int unknowns = 0;
        for (const Declaration* d : vars)
            unknowns += (settings.domain == Domain::Complex && scope.types[d->name] == ValueType::Complex) ? 2 : 1;

        int equations = 0;
        bool counted = true;
        for (const auto& g : doc.groups) {
            switch (g.kind) {
                case GroupKind::NLEs:
                case GroupKind::WLSEs:
                case GroupKind::ECs: {
                    statements(g.statements, scope, g.kind, submodel);
                    if (g.kind == GroupKind::NLEs) {
                        int n = count_equations(g.statements);
                        if (n < 0) {
                            error(g.loc, "conditional arms contribute different numbers of equations");
                            counted = false;
                        } else {
                            equations += n;
                        }
                    }
                    break;
                }
                case GroupKind::Limits:
                    statements(g.statements, scope, g.kind, submodel);
                    for (const auto& sub : g.subgroups) statements(sub.statements, scope, sub.kind, submodel);
                    break;
                case GroupKind::Vars:
                case GroupKind::Params:
                case GroupKind::Distributions: break;
                default: statements(g.statements, scope, g.kind, submodel); break;
            }
        }

        if (settings.type == ModelType::NL) {
            if (doc.groups_of(GroupKind::NLEs).empty()) error(doc.model.loc, "an NL model needs an NLEs group");
            if (counted && equations != unknowns)
                error(doc.model.loc, "NL model has " + std::to_string(equations) + " equations for " +
                                         std::to_string(unknowns) + " unknowns");
        } else if (doc.groups_of(GroupKind::WLSEs).empty()) {
            error(doc.model.loc, "a WLS model needs a WLSEs group");
        }

        if (!submodel) {
            parent_param_order_ = param_order;
            main_scope_ = scope;
            for (const auto& sub : doc.submodels) model(sub, &main_scope_, &settings);
        }
    }

    void statements(const std::vector<Statement>& list, const Scope& scope, GroupKind kind, bool submodel) {
        for (const auto& st : list) statement(st, scope, kind, submodel);
    }

    void statement(const Statement& st, const Scope& scope, GroupKind kind, bool submodel) {
        bool equation_group = kind == GroupKind::NLEs || kind == GroupKind::WLSEs || kind == GroupKind::ECs;
        if (const auto* e = std::get_if<EquationStmt>(&st.node)) {
            check_identifiers(e->lhs, scope, e->loc, "equation");
            if (e->rhs) check_identifiers(*e->rhs, scope, e->loc, "equation");
            if (contains_non_smooth(e->lhs) || (e->rhs && contains_non_smooth(*e->rhs)))
                error(e->loc, "round, disc, rnd and sign may only be used in assignments");
            const Attribute* w = e->attrs.find("w");
            if (kind == GroupKind::WLSEs) {
                if (!w) {
                    error(e->loc, "measurement equation needs a weight attribute [w=...]");
                } else if (w->value.kind == AttrValue::Kind::Number) {
                    if (w->value.number <= 0) error(w->loc, "weight must be positive");
                } else if (w->value.kind != AttrValue::Kind::Word || !scope.names.count(w->value.text)) {
                    error(w->loc, "weight must be a number or a declared parameter");
                }
            } else if (w) {
                error(w->loc, kind == GroupKind::ECs ? "equality constraints carry no weights"
                                                     : "weights are only allowed on WLSEs");
            }
            return;
        }
        if (const auto* a = std::get_if<AssignStmt>(&st.node)) {
            check_identifiers(a->value, scope, a->loc, "assignment");
            const Scope* target_scope = &scope;
            if (a->target.main_scope) {
                if (!submodel) {
                    error(a->loc, "'@main.' targets are only allowed inside a SubModel");
                    return;
                }
                target_scope = &main_scope_;
            }
            auto it = target_scope->types.find(a->target.name);
            if (it == target_scope->types.end()) {
                error(a->loc, "assignment to undeclared name '" + a->target.name + "'");
                return;
            }
            if (a->target.component == Component::Imag && it->second != ValueType::Complex)
                error(a->loc, "'.imag' selector on real-typed '" + a->target.name + "'");
            if (a->target.component != Component::Whole && it->second == ValueType::Bool)
                error(a->loc, "component selector on boolean '" + a->target.name + "'");
            return;
        }
        if (const auto* r = std::get_if<RepeatMarker>(&st.node)) {
            if (kind != GroupKind::Repeats) error(r->loc, "'repeat' is only allowed in the Repeats group");
            return;
        }
        if (const auto* s = std::get_if<IfStmt>(&st.node)) {
            check_identifiers(s->guard, scope, s->loc, "guard");
            statements(s->then_body, scope, kind, submodel);
            statements(s->else_body, scope, kind, submodel);
            return;
        }
        if (const auto* s = std::get_if<SwitchStmt>(&st.node)) {
            for (std::size_t i = 0; i < s->cases.size(); ++i) {
                const SwitchCase& c = s->cases[i];
                if (!c.guard && i + 1 != s->cases.size()) error(c.loc, "'default' must be the last case");
                if (c.guard) check_identifiers(*c.guard, scope, c.loc, "guard");
                statements(c.body, scope, kind, submodel);
            }
            return;
        }
        (void)equation_group;
    }

    std::vector<Diagnostic> out_;
    std::vector<std::pair<std::string, ValueType>> parent_param_order_;
    Scope main_scope_;
};

}  // namespace

int count_equations(const std::vector<Statement>& statements) {
    int total = 0;
    for (const auto& st : statements) {
        if (std::holds_alternative<EquationStmt>(st.node)) {
            ++total;
        } else if (const auto* s = std::get_if<IfStmt>(&st.node)) {
            int a = count_equations(s->then_body);
            int b = count_equations(s->else_body);
            if (a < 0 || b < 0 || a != b) return -1;
            total += a;
        } else if (const auto* s = std::get_if<SwitchStmt>(&st.node)) {
            int n = -2;
            for (const auto& c : s->cases) {
                int k = count_equations(c.body);
                if (k < 0 || (n != -2 && k != n)) return -1;
                n = k;
            }
            total += n;
        }
    }
    return total;
}

std::vector<Diagnostic> validate_document(const ModelDocument& doc) { return Validator().run(doc); }

}  // namespace symgrid
