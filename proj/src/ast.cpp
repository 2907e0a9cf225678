#include "symgrid/ast.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace symgrid {

const Attribute* AttributeList::find(std::string_view name) const {
    for (const auto& a : items)
        if (a.name == name) return &a;
    return nullptr;
}

std::optional<double> AttributeList::number(std::string_view name) const {
    const Attribute* a = find(name);
    if (!a || a->value.kind != AttrValue::Kind::Number) return std::nullopt;
    return a->value.number;
}

std::optional<bool> AttributeList::boolean(std::string_view name) const {
    const Attribute* a = find(name);
    if (!a) return std::nullopt;
    if (a->value.kind == AttrValue::Kind::Boolean) return a->value.flag;
    if (a->value.kind == AttrValue::Kind::String || a->value.kind == AttrValue::Kind::Word) {
        if (a->value.text == "true") return true;
        if (a->value.text == "false") return false;
    }
    return std::nullopt;
}

std::optional<std::string> AttributeList::text(std::string_view name) const {
    const Attribute* a = find(name);
    if (!a) return std::nullopt;
    if (a->value.kind == AttrValue::Kind::Word || a->value.kind == AttrValue::Kind::String) return a->value.text;
    return std::nullopt;
}

std::string_view to_string(AssignOp op) {
    switch (op) {
        case AssignOp::Set: return "=";
        case AssignOp::Add: return "+=";
        case AssignOp::Subtract: return "-=";
        case AssignOp::Multiply: return "*=";
        case AssignOp::Divide: return "/=";
        case AssignOp::Power: return "^=";
    }
    return "=";
}

namespace {

constexpr std::array<std::pair<GroupKind, std::string_view>, 17> kGroupNames{{
    {GroupKind::Header, "Header"},
    {GroupKind::Model, "Model"},
    {GroupKind::Vars, "Vars"},
    {GroupKind::Params, "Params"},
    {GroupKind::NLEs, "NLEs"},
    {GroupKind::WLSEs, "WLSEs"},
    {GroupKind::ECs, "ECs"},
    {GroupKind::Limits, "Limits"},
    {GroupKind::LimitGroup, "group"},
    {GroupKind::Repeats, "Repeats"},
    {GroupKind::ReInit, "ReInit"},
    {GroupKind::PreProc, "PreProc"},
    {GroupKind::PostProc, "PostProc"},
    {GroupKind::IterPostP, "IterPostP"},
    {GroupKind::BasePostP, "BasePostP"},
    {GroupKind::SubModel, "SubModel"},
    {GroupKind::Distributions, "Distributions"},
}};

}  // namespace

std::string_view to_string(GroupKind kind) {
    for (const auto& [k, name] : kGroupNames)
        if (k == kind) return name;
    return "?";
}

std::optional<GroupKind> section_kind(std::string_view keyword) {
    for (const auto& [k, name] : kGroupNames) {
        if (name != keyword) continue;
        if (k == GroupKind::Header || k == GroupKind::Model || k == GroupKind::LimitGroup) return std::nullopt;
        return k;
    }
    return std::nullopt;
}

std::vector<const Group*> ModelDocument::groups_of(GroupKind kind) const {
    std::vector<const Group*> out;
    for (const auto& g : groups)
        if (g.kind == kind) out.push_back(&g);
    return out;
}

std::string_view to_string(ModelType t) { return t == ModelType::NL ? "NL" : "WLS"; }

std::string_view to_string(ReportLevel r) {
    switch (r) {
        case ReportLevel::Solved: return "Solved";
        case ReportLevel::All: return "All";
        case ReportLevel::AllDetails: return "AllDetails";
    }
    return "Solved";
}

std::optional<ReportLevel> parse_report_level(std::string_view text) {
    if (text == "Solved") return ReportLevel::Solved;
    if (text == "All") return ReportLevel::All;
    if (text == "AllDetails") return ReportLevel::AllDetails;
    return std::nullopt;
}

std::optional<Domain> parse_domain(std::string_view text) {
    if (text == "real") return Domain::Real;
    if (text == "cplx" || text == "cmplx" || text == "complex") return Domain::Complex;
    return std::nullopt;
}

ModelSettings resolve_settings(const ModelDocument& doc, const ModelSettings* parent) {
    ModelSettings s;
    if (parent) {
        s.max_iter = parent->max_iter;
        s.max_reps = parent->max_reps;
        s.report = parent->report;
    }
    // Header keys first, then model attributes (a submodel carries everything on its own line).
    for (const AttributeList* attrs : {&doc.header.attrs, &doc.model.attrs}) {
        if (auto v = attrs->number("maxIter")) s.max_iter = static_cast<int>(std::lround(*v));
        if (auto v = attrs->number("maxReps")) s.max_reps = static_cast<int>(std::lround(*v));
        if (auto v = attrs->text("report"))
            if (auto level = parse_report_level(*v)) s.report = *level;
    }
    const AttributeList& m = doc.model.attrs;
    if (auto v = m.text("type")) s.type = (*v == "WLS") ? ModelType::WLS : ModelType::NL;
    if (auto v = m.text("domain"))
        if (auto d = parse_domain(*v)) s.domain = *d;
    if (auto v = m.number("eps")) s.eps = *v;
    if (auto v = m.boolean("reInit")) s.reinit = *v;
    if (auto v = m.text("name")) s.name = *v;
    if (auto v = m.number("copyPars")) s.copy_pars = static_cast<int>(std::lround(*v));
    if (auto v = m.boolean("alwaysOn")) s.always_on = *v;
    return s;
}

}  // namespace symgrid
