#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace asmprop {

/// 1-based line/column; zero means "no position".
struct SourcePos {
    int line = 0;
    int column = 0;

    bool known() const { return line > 0; }
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class ValueKind : std::uint8_t { Boolean, Integer, Enumeration };

/// A constant of a finite domain. Enumeration values are stored as the index
/// of the constant inside its domain; the owning domain gives the name back.
struct Value {
    ValueKind kind = ValueKind::Integer;
    std::int64_t raw = 0;

    static Value boolean(bool b) { return {ValueKind::Boolean, b ? 1 : 0}; }
    static Value integer(std::int64_t v) { return {ValueKind::Integer, v}; }
    static Value enumeration(std::int64_t index) { return {ValueKind::Enumeration, index}; }

    bool as_bool() const { return raw != 0; }

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;
};

// ---------------------------------------------------------------------------
// Terms

enum class TermKind : std::uint8_t {
    Literal,     // Boolean or integer constant
    Apply,       // function application, 0-ary function or enum constant
    Variable,    // $x, bound by a parameterised definition
    Arithmetic,
    Comparison,
    Logical,
};

enum class ArithOp : std::uint8_t { Add, Sub, Mod };
enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp : std::uint8_t { Not, And, Or, Implies, Iff };

struct Term {
    TermKind kind = TermKind::Literal;
    Value literal;
    std::string name;  // Apply / Variable
    ArithOp arith = ArithOp::Add;
    CompareOp compare = CompareOp::Eq;
    LogicOp logic = LogicOp::And;
    std::vector<Term> operands;  // Apply: 0 or 1 argument; Not: 1; others: 2
    SourcePos pos;

    static Term boolean(bool b, SourcePos p = {});
    static Term integer(std::int64_t v, SourcePos p = {});
    static Term apply(std::string name, SourcePos p = {});
    static Term apply(std::string name, Term arg, SourcePos p = {});
    static Term variable(std::string name, SourcePos p = {});
    static Term arithmetic(ArithOp op, Term lhs, Term rhs, SourcePos p = {});
    static Term comparison(CompareOp op, Term lhs, Term rhs, SourcePos p = {});
    static Term negation(Term operand, SourcePos p = {});
    static Term connective(LogicOp op, Term lhs, Term rhs, SourcePos p = {});

    bool has_argument() const { return kind == TermKind::Apply && !operands.empty(); }

    /// Structural equality; positions are ignored.
    friend bool operator==(const Term& a, const Term& b);
};

// ---------------------------------------------------------------------------
// Temporal formulas

enum class Logic : std::uint8_t { CTL, LTL };

enum class FormulaKind : std::uint8_t { Atom, Not, And, Or, Implies, Iff, Temporal };

enum class TemporalOp : std::uint8_t { AG, AF, AX, EG, EF, EX, AU, EU, G, F, X, U };

bool is_ctl_operator(TemporalOp op);
bool is_binary_operator(TemporalOp op);
const char* operator_name(TemporalOp op);  // uppercase spelling, e.g. "AG"

struct Formula {
    FormulaKind kind = FormulaKind::Atom;
    TemporalOp temporal = TemporalOp::AG;
    Term atom;
    std::vector<Formula> operands;
    SourcePos pos;

    static Formula make_atom(Term t);
    static Formula negation(Formula f, SourcePos p = {});
    static Formula binary(FormulaKind kind, Formula lhs, Formula rhs, SourcePos p = {});
    static Formula unary(TemporalOp op, Formula f, SourcePos p = {});
    static Formula until(TemporalOp op, Formula lhs, Formula rhs, SourcePos p = {});

    /// True when no temporal operator occurs anywhere in the formula.
    bool is_state_formula() const;

    friend bool operator==(const Formula& a, const Formula& b);
};

// ---------------------------------------------------------------------------
// Rules

enum class RuleKind : std::uint8_t { Update, Parallel, Conditional, MacroCall };

struct Rule {
    RuleKind kind = RuleKind::Parallel;
    Term location;             // Update
    Term value;                // Update
    Term guard;                // Conditional
    std::vector<Rule> body;    // Parallel: children; Conditional: then [, else]
    std::string macro;         // MacroCall
    SourcePos pos;

    static Rule update(Term location, Term value, SourcePos p = {});
    static Rule parallel(std::vector<Rule> rules, SourcePos p = {});
    static Rule conditional(Term guard, Rule then_rule, std::optional<Rule> else_rule,
                            SourcePos p = {});
    static Rule call(std::string macro, SourcePos p = {});

    bool has_else() const { return kind == RuleKind::Conditional && body.size() == 2; }

    friend bool operator==(const Rule& a, const Rule& b);
};

struct RuleDecl {
    std::string name;
    Rule body;
    SourcePos pos;

    friend bool operator==(const RuleDecl& a, const RuleDecl& b) {
        return a.name == b.name && a.body == b.body;
    }
};

// ---------------------------------------------------------------------------
// Declarations

enum class DomainKind : std::uint8_t { IntegerRange, Enumeration, Boolean };

struct DomainDecl {
    std::string name;
    DomainKind kind = DomainKind::IntegerRange;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<std::string> values;  // Enumeration
    SourcePos pos;

    static DomainDecl boolean();

    std::int64_t size() const;
    /// All values in domain order.
    std::vector<Value> elements() const;
    bool contains(const Value& v) const;

    friend bool operator==(const DomainDecl& a, const DomainDecl& b) {
        return a.name == b.name && a.kind == b.kind && a.lo == b.lo && a.hi == b.hi &&
               a.values == b.values;
    }
};

enum class FunctionKind : std::uint8_t { Monitored, Controlled, Static, Derived };

const char* to_string(FunctionKind kind);

struct FunctionDecl {
    std::string name;
    FunctionKind kind = FunctionKind::Controlled;
    std::optional<std::string> arg_domain;
    std::string result_domain;
    SourcePos pos;

    int arity() const { return arg_domain ? 1 : 0; }

    friend bool operator==(const FunctionDecl& a, const FunctionDecl& b) {
        return a.name == b.name && a.kind == b.kind && a.arg_domain == b.arg_domain &&
               a.result_domain == b.result_domain;
    }
};

/// `function f = t` or `function f($x in D) = t`, used both for static/derived
/// definitions and for init entries.
struct FunctionDefinition {
    std::string function;
    std::optional<std::string> parameter;         // "$x"
    std::optional<std::string> parameter_domain;  // "D"
    Term value;
    SourcePos pos;

    friend bool operator==(const FunctionDefinition& a, const FunctionDefinition& b) {
        return a.function == b.function && a.parameter == b.parameter &&
               a.parameter_domain == b.parameter_domain && a.value == b.value;
    }
};

enum class PropertyOrigin : std::uint8_t { HandWritten, AgentGenerated, CounterexampleDerived };

struct PropertyDecl {
    Logic logic = Logic::CTL;
    Formula formula;
    std::string source_text;
    PropertyOrigin origin = PropertyOrigin::HandWritten;
    SourcePos pos;

    /// Origin and source text are session metadata and do not take part.
    friend bool operator==(const PropertyDecl& a, const PropertyDecl& b) {
        return a.logic == b.logic && a.formula == b.formula;
    }
};

struct AsmSpecification {
    std::string name;
    std::vector<std::string> imports;
    std::vector<DomainDecl> domains;  // user domains, declaration order
    std::vector<FunctionDecl> functions;
    std::vector<FunctionDefinition> definitions;  // static / derived
    std::vector<RuleDecl> macro_rules;
    RuleDecl main_rule;
    std::vector<PropertyDecl> properties;
    std::string init_name = "s0";
    std::vector<FunctionDefinition> init;

    const RuleDecl* find_macro(const std::string& name) const;

    friend bool operator==(const AsmSpecification&, const AsmSpecification&) = default;
};

// ---------------------------------------------------------------------------
// Avalla scenarios

enum class CommandKind : std::uint8_t { Set, Step, Check, LoopMarker };

struct AvallaCommand {
    CommandKind kind = CommandKind::Step;
    Term location;   // Set
    Term value;      // Set
    Term condition;  // Check
    std::size_t loop_step = 0;  // LoopMarker: 0-based step index where the loop re-enters
    SourcePos pos;

    static AvallaCommand set(Term location, Term value, SourcePos p = {});
    static AvallaCommand step(SourcePos p = {});
    static AvallaCommand check(Term condition, SourcePos p = {});
    static AvallaCommand loop_marker(std::size_t step);

    friend bool operator==(const AvallaCommand& a, const AvallaCommand& b);
};

struct AvallaScenario {
    std::string name;
    std::string load;
    std::vector<AvallaCommand> commands;

    std::size_t step_count() const;

    friend bool operator==(const AvallaScenario&, const AvallaScenario&) = default;
};

}  // namespace asmprop
