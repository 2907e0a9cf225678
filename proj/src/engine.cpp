#include "symgrid/engine.hpp"

#include <stdexcept>

#include "symgrid/error.hpp"
#include "symgrid/evaluate.hpp"
#include "symgrid/parser.hpp"
#include "symgrid/system.hpp"

namespace symgrid {

namespace {

NodeKind op_kind(AssignOp op) {
    switch (op) {
        case AssignOp::Add: return NodeKind::Add;
        case AssignOp::Subtract: return NodeKind::Subtract;
        case AssignOp::Multiply: return NodeKind::Multiply;
        case AssignOp::Divide: return NodeKind::Divide;
        default: return NodeKind::Power;
    }
}

Value combine(const Value& current, AssignOp op, const Value& rhs) {
    if (op == AssignOp::Set) return rhs;
    static const Env empty;
    return evaluate(make_binary(op_kind(op), make_constant(current), make_constant(rhs)), empty);
}

std::string with_loc(const SourceLoc& loc, const std::string& msg) { return to_string(loc) + ": " + msg; }

ValueType declared_type(const Declaration& d, const AttributeList& group_attrs, Domain domain) {
    const Attribute* t = d.attrs.find("type");
    if (!t) t = group_attrs.find("type");
    if (t) {
        if (auto vt = parse_value_type(t->value.text)) return *vt;
        throw ModelError(t->loc, "unknown type '" + t->value.text + "'");
    }
    if (d.init && (*d.init)->kind == NodeKind::Constant && (*d.init)->value.is_bool()) return ValueType::Bool;
    return domain == Domain::Complex ? ValueType::Complex : ValueType::Real;
}

bool is_out(const Declaration& d, const AttributeList& group_attrs) {
    if (auto o = d.attrs.boolean("out")) return *o;
    return group_attrs.boolean("out").value_or(false);
}

struct ExecContext {
    bool limit_mode = false;
    std::string group;
    int repeat = 0;
    int outer = 0;
    std::vector<Signal>* signals = nullptr;
    std::vector<std::string>* log = nullptr;
    std::set<std::string>* main_writes = nullptr;
    bool repeat_marker = false;
};

void execute(const std::vector<Statement>& body, Env& env, ExecContext& ctx);

void take_arm(const AttributeList& attrs, int index, const std::vector<Statement>& body, Env& env,
              ExecContext& ctx) {
    if (ctx.limit_mode) {
        if (auto sig = attrs.text("signal")) {
            if (ctx.signals) ctx.signals->push_back({*sig, ctx.group, index, ctx.repeat, ctx.outer});
            if (ctx.log) ctx.log->push_back("group " + ctx.group + ": signal " + *sig);
        }
    }
    execute(body, env, ctx);
}

bool guard(const Expr& g, const Env& env, const SourceLoc& loc) {
    try {
        return evaluate_guard(g, env);
    } catch (const EvalError& e) {
        throw EvalError(with_loc(loc, e.what()));
    }
}

void execute(const std::vector<Statement>& body, Env& env, ExecContext& ctx) {
    for (const auto& st : body) {
        if (const auto* a = std::get_if<AssignStmt>(&st.node)) {
            auto written = apply_assignment(*a, env);
            if (written && ctx.main_writes) ctx.main_writes->insert(*written);
            if (ctx.log && ctx.limit_mode)
                ctx.log->push_back("group " + ctx.group + ": " + a->target.name + " = " +
                                   format_value(env.get(a->target.name)));
        } else if (const auto* s = std::get_if<IfStmt>(&st.node)) {
            if (guard(s->guard, env, s->loc))
                take_arm(s->guard_attrs, 0, s->then_body, env, ctx);
            else if (s->has_else)
                take_arm(s->else_attrs, 1, s->else_body, env, ctx);
        } else if (const auto* s = std::get_if<SwitchStmt>(&st.node)) {
            for (std::size_t i = 0; i < s->cases.size(); ++i) {
                const auto& c = s->cases[i];
                if (!c.guard || guard(*c.guard, env, c.loc)) {
                    take_arm(c.attrs, static_cast<int>(i), c.body, env, ctx);
                    break;
                }
            }
        } else if (std::holds_alternative<RepeatMarker>(st.node)) {
            ctx.repeat_marker = true;
        } else if (const auto* eq = std::get_if<EquationStmt>(&st.node)) {
            throw EvalError(with_loc(eq->loc, "equation outside an equation group"));
        }
    }
}

std::vector<Statement> concat(const ModelDocument& doc, GroupKind kind) {
    std::vector<Statement> out;
    for (const Group* g : doc.groups_of(kind)) out.insert(out.end(), g->statements.begin(), g->statements.end());
    return out;
}

/// One model scope: declarations, compiled equations, and the solve/limit loop.
class Instance {
  public:
    Instance(const ModelDocument& doc, ModelSettings settings, Env& env)
        : doc_(doc), settings_(std::move(settings)), env_(env) {}

    const ModelSettings& settings() const { return settings_; }
    const std::vector<std::string>& param_order() const { return params_; }
    const std::vector<std::string>& output_names() const { return outputs_; }
    const std::vector<std::string>& variables() const { return vars_; }

    void declare() {
        for (const Group* g : doc_.groups_of(GroupKind::Distributions)) {
            for (const auto& st : g->statements) {
                const auto* d = std::get_if<DistDecl>(&st.node);
                if (!d) continue;
                Distribution dist{d->name, d->attrs.number("mean").value_or(0.0), d->attrs.number("dev").value_or(0.0)};
                if (dist.dev < 0.0) throw ModelError(d->loc, "distribution dev must be >= 0");
                env_.distributions[d->name] = dist;
            }
        }
        for (const auto& g : doc_.groups) {
            if (g.kind != GroupKind::Params && g.kind != GroupKind::Vars) continue;
            for (const auto& st : g.statements) {
                const auto* d = std::get_if<Declaration>(&st.node);
                if (!d) continue;
                if (is_out(*d, g.attrs)) outputs_.push_back(d->name);
                if (g.kind == GroupKind::Params) {
                    params_.push_back(d->name);
                    define(*d, g.attrs, false);
                } else {
                    vars_.push_back(d->name);
                    var_decls_.push_back({d, &g.attrs});
                }
            }
        }
        reset_variables();
    }

    void copy_params_from(const Env& parent, const std::vector<std::string>& names, int count) {
        for (int i = 0; i < count && i < static_cast<int>(names.size()); ++i) {
            const Env::Binding* b = parent.find(names[i]);
            env_.define(names[i], b->value, b->type, false);
        }
    }

    /// Re-evaluates variable initializers (or the domain default).
    void reset_variables() {
        for (const auto& [d, attrs] : var_decls_) define(*d, *attrs, true);
    }

    /// Re-evaluates parameter (and optionally variable) initializers that depend on `changed`.
    void refresh(std::set<std::string> changed, bool variables) {
        if (changed.empty()) return;
        auto pass = [&](GroupKind kind) {
            for (const Group* g : doc_.groups_of(kind)) {
                for (const auto& st : g->statements) {
                    const auto* d = std::get_if<Declaration>(&st.node);
                    if (!d || !d->init) continue;
                    bool depends = false;
                    for (const auto& name : collect_identifiers(*d->init)) depends = depends || changed.count(name);
                    if (!depends) continue;
                    define(*d, g->attrs, kind == GroupKind::Vars);
                    changed.insert(d->name);
                }
            }
        };
        pass(GroupKind::Params);
        if (variables) pass(GroupKind::Vars);
    }

    void compile() {
        std::vector<UnknownSlot> cols = layout_unknowns(vars_, env_);
        if (settings_.type == ModelType::NL) {
            nl_ = EquationSystem(concat(doc_, GroupKind::NLEs), cols, env_);
        } else {
            meas_ = EquationSystem(concat(doc_, GroupKind::WLSEs), cols, env_);
            cons_ = EquationSystem(concat(doc_, GroupKind::ECs), cols, env_);
        }
        iter_post_ = concat(doc_, GroupKind::IterPostP);
    }

    void run_group(GroupKind kind, ExecContext& ctx) {
        for (const Group* g : doc_.groups_of(kind)) execute(g->statements, env_, ctx);
    }

    SolveRecord inner_solve(int outer) {
        SolveRecord sr;
        sr.outer = outer;
        sr.type = settings_.type;
        IterationHook hook;
        if (!iter_post_.empty()) {
            hook = [this](int) {
                ExecContext ctx;
                execute(iter_post_, env_, ctx);
            };
        }
        if (settings_.type == ModelType::NL) {
            sr.newton = newton_solve(nl_, env_, settings_.eps, settings_.max_iter, hook);
            sr.converged = sr.newton.converged;
            sr.iterations = sr.newton.iterations;
            sr.failure = sr.newton.failure;
            sr.symbolic_nonzeros = nl_.symbolic_nonzeros();
        } else {
            sr.estimate = wls_estimate(meas_, cons_, env_, settings_.eps, settings_.max_iter, hook);
            sr.converged = sr.estimate->converged;
            sr.iterations = sr.estimate->iterations;
            sr.failure = sr.estimate->failure;
            sr.symbolic_nonzeros = meas_.symbolic_nonzeros() + cons_.symbolic_nonzeros();
        }
        return sr;
    }

    bool process_limits(RepeatRecord& rec, SolveRecord& sr, int outer) {
        return process_limit_groups(doc_, env_, rec.index, outer, rec.signals, &sr.limit_log);
    }

    /// Steps (4)-(5): inner solve plus the outer limit loop. Returns false on a solve failure.
    bool solve_with_limits(RepeatRecord& rec) {
        for (int outer = 0;; ++outer) {
            rec.solves.push_back(inner_solve(outer));
            SolveRecord& sr = rec.solves.back();
            if (!sr.converged) return false;
            if (!process_limits(rec, sr, outer)) return true;
            if (outer + 1 >= settings_.max_iter)
                throw EvalError("limit processing did not settle after " + std::to_string(settings_.max_iter) +
                                " outer passes (limit cycling)");
        }
    }

    std::vector<OutputValue> outputs() const {
        std::vector<OutputValue> out;
        for (const auto& name : outputs_) {
            const Env::Binding* b = env_.find(name);
            if (b) out.push_back({name, b->value, b->variable});
        }
        return out;
    }

  private:
    void define(const Declaration& d, const AttributeList& group_attrs, bool variable) {
        ValueType type = declared_type(d, group_attrs, env_.domain());
        Value v;
        if (d.init) {
            try {
                v = evaluate(*d.init, env_);
            } catch (const EvalError& e) {
                throw EvalError(with_loc(d.loc, e.what()));
            }
        } else if (variable && env_.domain() == Domain::Complex) {
            v = Value::complex({1.0, 0.0});
        } else {
            v = Value::real(0.0);
        }
        try {
            env_.define(d.name, v, type, variable);
        } catch (const EvalError& e) {
            throw EvalError(with_loc(d.loc, e.what()));
        }
    }

    const ModelDocument& doc_;
    ModelSettings settings_;
    Env& env_;
    std::vector<std::string> params_;
    std::vector<std::string> vars_;
    std::vector<std::pair<const Declaration*, const AttributeList*>> var_decls_;
    std::vector<std::string> outputs_;
    std::vector<Statement> iter_post_;
    EquationSystem nl_, meas_, cons_;
};

/// Step (3) for one submodel. Returns the main-scope names it wrote.
std::set<std::string> run_submodel(const ModelDocument& sub, const ModelSettings& parent_settings, Env& main_env,
                                   const Instance& main, Rng& rng, RepeatRecord& rec) {
    ModelSettings s = resolve_settings(sub, &parent_settings);
    Env env(s.domain, &main_env, &rng);
    Instance inst(sub, s, env);
    inst.copy_params_from(main_env, main.param_order(), s.copy_pars);
    inst.declare();
    inst.compile();
    std::set<std::string> writes;
    ExecContext ctx;
    ctx.main_writes = &writes;
    inst.run_group(GroupKind::PreProc, ctx);
    RepeatRecord sub_rec;
    sub_rec.index = rec.index;
    bool ok = inst.solve_with_limits(sub_rec);
    const std::string label = s.name.empty() ? std::string("submodel") : "submodel \"" + s.name + "\"";
    for (const auto& sr : sub_rec.solves)
        rec.submodel_log.push_back(label + ": " + (sr.converged ? "converged" : "failed") + " in " +
                                   std::to_string(sr.iterations) + " iterations");
    for (const auto& sig : sub_rec.signals) rec.signals.push_back(sig);
    if (!ok) throw EvalError(label + " failed to solve: " + sub_rec.solves.back().failure);
    inst.run_group(GroupKind::PostProc, ctx);
    return writes;
}

}  // namespace

bool process_limit_groups(const ModelDocument& doc, Env& env, int repeat, int outer, std::vector<Signal>& fired,
                          std::vector<std::string>* log) {
    for (const Group* limits : doc.groups_of(GroupKind::Limits)) {
        for (const auto& lg : limits->subgroups) {
            if (!lg.attrs.boolean("enabled").value_or(true)) continue;
            ExecContext ctx;
            ctx.limit_mode = true;
            ctx.group = lg.attrs.text("name").value_or("");
            ctx.repeat = repeat;
            ctx.outer = outer;
            ctx.signals = &fired;
            ctx.log = log;
            std::size_t before = fired.size();
            execute(lg.statements, env, ctx);
            if (fired.size() > before) return true;
        }
    }
    return false;
}

std::optional<std::string> apply_assignment(const AssignStmt& st, Env& env) {
    try {
        Env* target = &env;
        if (st.target.main_scope) {
            if (!env.parent()) throw EvalError("@main. target used outside a submodel");
            target = env.parent();
        }
        const std::string& name = st.target.name;
        const Env::Binding* b = target->find(name);
        if (!b) throw EvalError("assignment to undeclared name '" + name + "'");
        Value rhs = evaluate(st.value, env);
        if (st.target.component == Component::Whole) {
            target->assign(name, combine(b->value, st.op, rhs));
        } else {
            bool imag = st.target.component == Component::Imag;
            if (b->type == ValueType::Bool) throw EvalError("component selector on boolean '" + name + "'");
            if (imag && b->type != ValueType::Complex) throw EvalError(".imag on real-typed '" + name + "'");
            double cur = imag ? b->value.z.imag() : b->value.z.real();
            target->assign_component(name, imag, combine(Value::real(cur), st.op, rhs).as_real("component value"));
        }
        if (st.target.main_scope) return name;
        return std::nullopt;
    } catch (const EvalError& e) {
        throw EvalError(with_loc(st.loc, e.what()));
    }
}

RunReport run_document(const ModelDocument& doc, std::uint64_t seed) {
    RunReport report;
    report.seed = seed;
    report.has_repeats = !doc.groups_of(GroupKind::Repeats).empty();
    try {
        report.settings = resolve_settings(doc);
    } catch (const std::exception& e) {
        report.error = e.what();
        return report;
    }
    const ModelSettings& s = report.settings;
    report.model_name = s.name;
    Rng rng(seed);
    Env env(s.domain, nullptr, &rng);
    Instance main(doc, s, env);
    std::optional<Env> last_good;
    std::vector<OutputValue> last_outputs;
    bool base_done = false;
    try {
        main.declare();
        main.compile();
        report.output_names = main.output_names();
        for (int pass = 0;; ++pass) {
            report.repeats.push_back({});
            RepeatRecord& rec = report.repeats.back();
            rec.index = pass;
            ExecContext ctx;
            ctx.repeat = pass;
            if (pass == 0) main.run_group(GroupKind::PreProc, ctx);
            if (pass == 0 || s.reinit) {
                if (pass > 0) main.reset_variables();
                main.run_group(GroupKind::ReInit, ctx);
            }
            std::set<std::string> written;
            for (const auto& sub : doc.submodels) {
                ModelSettings sub_settings = resolve_settings(sub, &s);
                if (pass > 0 && !sub_settings.always_on) continue;
                auto w = run_submodel(sub, s, env, main, rng, rec);
                written.insert(w.begin(), w.end());
            }
            main.refresh(written, pass == 0 || s.reinit);

            bool ok = main.solve_with_limits(rec);
            rec.converged = ok;
            if (!ok) {
                if (pass == 0) {
                    report.error = "model did not converge: " + rec.solves.back().failure;
                    return report;
                }
                // A failed repeat ends repetition; the last converged pass is the result.
                report.repeats_stopped_by_failure = true;
                env = *last_good;
                break;
            }
            rec.outputs = main.outputs();
            if (!base_done) {
                main.run_group(GroupKind::BasePostP, ctx);
                base_done = true;
            }
            last_good = env;
            ExecContext rctx;
            rctx.repeat = pass;
            main.run_group(GroupKind::Repeats, rctx);
            if (!rctx.repeat_marker || pass + 1 >= s.max_reps) break;
        }
        ExecContext pctx;
        main.run_group(GroupKind::PostProc, pctx);
        report.converged = true;
        report.outputs = main.outputs();
    } catch (const ModelError& e) {
        report.error = e.what();
    } catch (const EvalError& e) {
        report.error = e.what();
    }
    return report;
}

std::vector<std::string> declare_model(const ModelDocument& doc, Env& env) {
    Instance inst(doc, resolve_settings(doc), env);
    inst.declare();
    return inst.variables();
}

bool override_param(ModelDocument& doc, const std::string& name, const std::string& expr_text) {
    bool found = false;
    for (auto& g : doc.groups) {
        if (g.kind != GroupKind::Params) continue;
        for (auto& st : g.statements) {
            if (auto* d = std::get_if<Declaration>(&st.node); d && d->name == name) {
                d->init = parse_expression(expr_text);
                found = true;
            }
        }
    }
    for (auto& sub : doc.submodels) found = override_param(sub, name, expr_text) || found;
    return found;
}

void override_model_attribute(ModelDocument& doc, const std::string& name, const AttrValue& value) {
    auto& items = doc.model.attrs.items;
    items.insert(items.begin(), Attribute{name, value, {}});
}

bool override_distribution(ModelDocument& doc, const std::string& name, const std::string& attr, double value) {
    bool found = false;
    for (auto& g : doc.groups) {
        if (g.kind != GroupKind::Distributions) continue;
        for (auto& st : g.statements) {
            if (auto* d = std::get_if<DistDecl>(&st.node); d && d->name == name) {
                AttrValue v;
                v.kind = AttrValue::Kind::Number;
                v.number = value;
                d->attrs.items.insert(d->attrs.items.begin(), Attribute{attr, v, {}});
                found = true;
            }
        }
    }
    for (auto& sub : doc.submodels) found = override_distribution(sub, name, attr, value) || found;
    return found;
}

}  // namespace symgrid
