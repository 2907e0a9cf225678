#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "symgrid/error.hpp"
#include "symgrid/expr.hpp"

namespace symgrid {

struct AttrValue {
    enum class Kind { Number, String, Word, Boolean };
    Kind kind = Kind::Word;
    double number = 0.0;
    std::string text;  // String contents or Word spelling
    bool flag = false;

    friend bool operator==(const AttrValue&, const AttrValue&) = default;
};

struct Attribute {
    std::string name;
    AttrValue value;
    SourceLoc loc;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered attribute list. Lookups honour the first occurrence of a name only.
struct AttributeList {
    std::vector<Attribute> items;

    const Attribute* find(std::string_view name) const;
    bool empty() const { return items.empty(); }

    std::optional<double> number(std::string_view name) const;
    std::optional<bool> boolean(std::string_view name) const;
    /// Word or string spelling.
    std::optional<std::string> text(std::string_view name) const;

    friend bool operator==(const AttributeList&, const AttributeList&) = default;
};

enum class AssignOp { Set, Add, Subtract, Multiply, Divide, Power };
enum class Component { Whole, Real, Imag };

std::string_view to_string(AssignOp op);

struct AssignTarget {
    bool main_scope = false;  // `@main.` prefix
    std::string name;
    Component component = Component::Whole;

    friend bool operator==(const AssignTarget&, const AssignTarget&) = default;
};

/// `lhs [= rhs]`; a missing rhs means the expression equals zero.
struct EquationStmt {
    Expr lhs;
    std::optional<Expr> rhs;
    AttributeList attrs;
    SourceLoc loc;

    friend bool operator==(const EquationStmt&, const EquationStmt&) = default;
};

struct AssignStmt {
    AssignTarget target;
    AssignOp op = AssignOp::Set;
    Expr value;
    SourceLoc loc;

    friend bool operator==(const AssignStmt&, const AssignStmt&) = default;
};

/// Variable or parameter declaration (which one depends on the enclosing group).
struct Declaration {
    std::string name;
    std::optional<Expr> init;
    AttributeList attrs;
    SourceLoc loc;

    friend bool operator==(const Declaration&, const Declaration&) = default;
};

/// `g1 [type=Gauss mean=0 dev=0.02]`
struct DistDecl {
    std::string name;
    AttributeList attrs;
    SourceLoc loc;

    friend bool operator==(const DistDecl&, const DistDecl&) = default;
};

struct Statement;

struct IfStmt {
    Expr guard;
    AttributeList guard_attrs;
    std::vector<Statement> then_body;
    bool has_else = false;
    AttributeList else_attrs;
    std::vector<Statement> else_body;
    SourceLoc loc;

    friend bool operator==(const IfStmt&, const IfStmt&) = default;
};

struct SwitchCase {
    std::optional<Expr> guard;  // nullopt for `default`
    AttributeList attrs;
    std::vector<Statement> body;
    SourceLoc loc;

    friend bool operator==(const SwitchCase&, const SwitchCase&) = default;
};

struct SwitchStmt {
    std::vector<SwitchCase> cases;
    SourceLoc loc;

    friend bool operator==(const SwitchStmt&, const SwitchStmt&) = default;
};

struct RepeatMarker {
    SourceLoc loc;

    friend bool operator==(const RepeatMarker&, const RepeatMarker&) = default;
};

struct Statement {
    std::variant<EquationStmt, AssignStmt, Declaration, DistDecl, IfStmt, SwitchStmt, RepeatMarker> node;

    friend bool operator==(const Statement&, const Statement&) = default;
};

enum class GroupKind {
    Header,
    Model,
    Vars,
    Params,
    NLEs,
    WLSEs,
    ECs,
    Limits,
    LimitGroup,
    Repeats,
    ReInit,
    PreProc,
    PostProc,
    IterPostP,
    BasePostP,
    SubModel,
    Distributions,
};

std::string_view to_string(GroupKind kind);
/// Keyword spelling for a group that may start a section of a model body.
std::optional<GroupKind> section_kind(std::string_view keyword);

struct Group {
    GroupKind kind = GroupKind::Vars;
    AttributeList attrs;
    std::vector<Statement> statements;
    std::vector<Group> subgroups;  // LimitGroups inside Limits
    SourceLoc loc;

    friend bool operator==(const Group&, const Group&) = default;
};

/// Parsed model file. A SubModel is a ModelDocument whose `model` group has kind SubModel
/// and whose header is empty.
struct ModelDocument {
    Group header{GroupKind::Header, {}, {}, {}, {}};
    Group model{GroupKind::Model, {}, {}, {}, {}};
    std::vector<Group> groups;
    std::vector<ModelDocument> submodels;

    std::vector<const Group*> groups_of(GroupKind kind) const;
    friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

enum class ModelType { NL, WLS };
enum class ReportLevel { Solved, All, AllDetails };

std::string_view to_string(ModelType t);
std::string_view to_string(ReportLevel r);
std::optional<ReportLevel> parse_report_level(std::string_view text);
std::optional<Domain> parse_domain(std::string_view text);

/// Model and header attributes with defaults applied.
struct ModelSettings {
    ModelType type = ModelType::NL;
    Domain domain = Domain::Real;
    double eps = 1e-6;
    int max_iter = 100;
    int max_reps = 100;
    ReportLevel report = ReportLevel::Solved;
    bool reinit = false;
    std::string name;
    int copy_pars = 0;
    bool always_on = false;
};

/// Resolves settings; a submodel inherits maxIter/maxReps/report from `parent` unless it sets them.
ModelSettings resolve_settings(const ModelDocument& doc, const ModelSettings* parent = nullptr);

}  // namespace symgrid
