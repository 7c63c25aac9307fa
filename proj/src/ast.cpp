#include "asmprop/ast.hpp"

#include <algorithm>

namespace asmprop {

Term Term::boolean(bool b, SourcePos p) {
    Term t;
    t.kind = TermKind::Literal;
    t.literal = Value::boolean(b);
    t.pos = p;
    return t;
}

Term Term::integer(std::int64_t v, SourcePos p) {
    Term t;
    t.kind = TermKind::Literal;
    t.literal = Value::integer(v);
    t.pos = p;
    return t;
}

Term Term::apply(std::string name, SourcePos p) {
    Term t;
    t.kind = TermKind::Apply;
    t.name = std::move(name);
    t.pos = p;
    return t;
}

Term Term::apply(std::string name, Term arg, SourcePos p) {
    Term t = apply(std::move(name), p);
    t.operands.push_back(std::move(arg));
    return t;
}

Term Term::variable(std::string name, SourcePos p) {
    Term t;
    t.kind = TermKind::Variable;
    t.name = std::move(name);
    t.pos = p;
    return t;
}

Term Term::arithmetic(ArithOp op, Term lhs, Term rhs, SourcePos p) {
    Term t;
    t.kind = TermKind::Arithmetic;
    t.arith = op;
    t.operands = {std::move(lhs), std::move(rhs)};
    t.pos = p;
    return t;
}

Term Term::comparison(CompareOp op, Term lhs, Term rhs, SourcePos p) {
    Term t;
    t.kind = TermKind::Comparison;
    t.compare = op;
    t.operands = {std::move(lhs), std::move(rhs)};
    t.pos = p;
    return t;
}

Term Term::negation(Term operand, SourcePos p) {
    Term t;
    t.kind = TermKind::Logical;
    t.logic = LogicOp::Not;
    t.operands = {std::move(operand)};
    t.pos = p;
    return t;
}

Term Term::connective(LogicOp op, Term lhs, Term rhs, SourcePos p) {
    Term t;
    t.kind = TermKind::Logical;
    t.logic = op;
    t.operands = {std::move(lhs), std::move(rhs)};
    t.pos = p;
    return t;
}

bool operator==(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case TermKind::Literal:
            return a.literal == b.literal;
        case TermKind::Apply:
            return a.name == b.name && a.operands == b.operands;
        case TermKind::Variable:
            return a.name == b.name;
        case TermKind::Arithmetic:
            return a.arith == b.arith && a.operands == b.operands;
        case TermKind::Comparison:
            return a.compare == b.compare && a.operands == b.operands;
        case TermKind::Logical:
            return a.logic == b.logic && a.operands == b.operands;
    }
    return false;
}

bool is_ctl_operator(TemporalOp op) {
    switch (op) {
        case TemporalOp::G:
        case TemporalOp::F:
        case TemporalOp::X:
        case TemporalOp::U:
            return false;
        default:
            return true;
    }
}

bool is_binary_operator(TemporalOp op) {
    return op == TemporalOp::AU || op == TemporalOp::EU || op == TemporalOp::U;
}

const char* operator_name(TemporalOp op) {
    switch (op) {
        case TemporalOp::AG: return "AG";
        case TemporalOp::AF: return "AF";
        case TemporalOp::AX: return "AX";
        case TemporalOp::EG: return "EG";
        case TemporalOp::EF: return "EF";
        case TemporalOp::EX: return "EX";
        case TemporalOp::AU: return "AU";
        case TemporalOp::EU: return "EU";
        case TemporalOp::G: return "G";
        case TemporalOp::F: return "F";
        case TemporalOp::X: return "X";
        case TemporalOp::U: return "U";
    }
    return "?";
}

Formula Formula::make_atom(Term t) {
    Formula f;
    f.kind = FormulaKind::Atom;
    f.pos = t.pos;
    f.atom = std::move(t);
    return f;
}

Formula Formula::negation(Formula operand, SourcePos p) {
    Formula f;
    f.kind = FormulaKind::Not;
    f.operands = {std::move(operand)};
    f.pos = p;
    return f;
}

Formula Formula::binary(FormulaKind kind, Formula lhs, Formula rhs, SourcePos p) {
    Formula f;
    f.kind = kind;
    f.operands = {std::move(lhs), std::move(rhs)};
    f.pos = p;
    return f;
}

Formula Formula::unary(TemporalOp op, Formula operand, SourcePos p) {
    Formula f;
    f.kind = FormulaKind::Temporal;
    f.temporal = op;
    f.operands = {std::move(operand)};
    f.pos = p;
    return f;
}

Formula Formula::until(TemporalOp op, Formula lhs, Formula rhs, SourcePos p) {
    Formula f;
    f.kind = FormulaKind::Temporal;
    f.temporal = op;
    f.operands = {std::move(lhs), std::move(rhs)};
    f.pos = p;
    return f;
}

bool Formula::is_state_formula() const {
    if (kind == FormulaKind::Temporal) return false;
    return std::all_of(operands.begin(), operands.end(),
                       [](const Formula& f) { return f.is_state_formula(); });
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == FormulaKind::Atom) return a.atom == b.atom;
    if (a.kind == FormulaKind::Temporal && a.temporal != b.temporal) return false;
    return a.operands == b.operands;
}

Rule Rule::update(Term location, Term value, SourcePos p) {
    Rule r;
    r.kind = RuleKind::Update;
    r.location = std::move(location);
    r.value = std::move(value);
    r.pos = p;
    return r;
}

Rule Rule::parallel(std::vector<Rule> rules, SourcePos p) {
    Rule r;
    r.kind = RuleKind::Parallel;
    r.body = std::move(rules);
    r.pos = p;
    return r;
}

Rule Rule::conditional(Term guard, Rule then_rule, std::optional<Rule> else_rule, SourcePos p) {
    Rule r;
    r.kind = RuleKind::Conditional;
    r.guard = std::move(guard);
    r.body.push_back(std::move(then_rule));
    if (else_rule) r.body.push_back(std::move(*else_rule));
    r.pos = p;
    return r;
}

Rule Rule::call(std::string macro, SourcePos p) {
    Rule r;
    r.kind = RuleKind::MacroCall;
    r.macro = std::move(macro);
    r.pos = p;
    return r;
}

bool operator==(const Rule& a, const Rule& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case RuleKind::Update:
            return a.location == b.location && a.value == b.value;
        case RuleKind::Parallel:
            return a.body == b.body;
        case RuleKind::Conditional:
            return a.guard == b.guard && a.body == b.body;
        case RuleKind::MacroCall:
            return a.macro == b.macro;
    }
    return false;
}

DomainDecl DomainDecl::boolean() {
    DomainDecl d;
    d.name = "Boolean";
    d.kind = DomainKind::Boolean;
    d.lo = 0;
    d.hi = 1;
    return d;
}

std::int64_t DomainDecl::size() const {
    switch (kind) {
        case DomainKind::Boolean: return 2;
        case DomainKind::Enumeration: return static_cast<std::int64_t>(values.size());
        case DomainKind::IntegerRange: return hi >= lo ? hi - lo + 1 : 0;
    }
    return 0;
}

std::vector<Value> DomainDecl::elements() const {
    std::vector<Value> out;
    switch (kind) {
        case DomainKind::Boolean:
            out = {Value::boolean(false), Value::boolean(true)};
            break;
        case DomainKind::Enumeration:
            for (std::size_t i = 0; i < values.size(); ++i)
                out.push_back(Value::enumeration(static_cast<std::int64_t>(i)));
            break;
        case DomainKind::IntegerRange:
            for (std::int64_t v = lo; v <= hi; ++v) out.push_back(Value::integer(v));
            break;
    }
    return out;
}

bool DomainDecl::contains(const Value& v) const {
    switch (kind) {
        case DomainKind::Boolean:
            return v.kind == ValueKind::Boolean;
        case DomainKind::Enumeration:
            return v.kind == ValueKind::Enumeration && v.raw >= 0 &&
                   v.raw < static_cast<std::int64_t>(values.size());
        case DomainKind::IntegerRange:
            return v.kind == ValueKind::Integer && v.raw >= lo && v.raw <= hi;
    }
    return false;
}

const char* to_string(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::Monitored: return "monitored";
        case FunctionKind::Controlled: return "controlled";
        case FunctionKind::Static: return "static";
        case FunctionKind::Derived: return "derived";
    }
    return "?";
}

const RuleDecl* AsmSpecification::find_macro(const std::string& rule_name) const {
    for (const auto& r : macro_rules)
        if (r.name == rule_name) return &r;
    return nullptr;
}

AvallaCommand AvallaCommand::set(Term location, Term value, SourcePos p) {
    AvallaCommand c;
    c.kind = CommandKind::Set;
    c.location = std::move(location);
    c.value = std::move(value);
    c.pos = p;
    return c;
}

AvallaCommand AvallaCommand::step(SourcePos p) {
    AvallaCommand c;
    c.kind = CommandKind::Step;
    c.pos = p;
    return c;
}

AvallaCommand AvallaCommand::check(Term condition, SourcePos p) {
    AvallaCommand c;
    c.kind = CommandKind::Check;
    c.condition = std::move(condition);
    c.pos = p;
    return c;
}

AvallaCommand AvallaCommand::loop_marker(std::size_t step) {
    AvallaCommand c;
    c.kind = CommandKind::LoopMarker;
    c.loop_step = step;
    return c;
}

bool operator==(const AvallaCommand& a, const AvallaCommand& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case CommandKind::Set: return a.location == b.location && a.value == b.value;
        case CommandKind::Step: return true;
        case CommandKind::Check: return a.condition == b.condition;
        case CommandKind::LoopMarker: return a.loop_step == b.loop_step;
    }
    return false;
}

std::size_t AvallaScenario::step_count() const {
    return static_cast<std::size_t>(std::count_if(
        commands.begin(), commands.end(),
        [](const AvallaCommand& c) { return c.kind == CommandKind::Step; }));
}

}  // namespace asmprop
