#include <sstream>

#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

// Binding strength, loosest first. Shared by the term and formula printers so
// atoms embed without extra parentheses.
enum Prec : int {
    kIff = 1,
    kImplies = 2,
    kOr = 3,
    kAnd = 4,
    kNot = 5,
    kCompare = 6,
    kAdd = 7,
    kMod = 8,
    kPrimary = 9,
};

int precedence(const Term& t) {
    switch (t.kind) {
        case TermKind::Literal:
        case TermKind::Apply:
        case TermKind::Variable:
            return kPrimary;
        case TermKind::Arithmetic:
            return t.arith == ArithOp::Mod ? kMod : kAdd;
        case TermKind::Comparison:
            return kCompare;
        case TermKind::Logical:
            switch (t.logic) {
                case LogicOp::Not: return kNot;
                case LogicOp::And: return kAnd;
                case LogicOp::Or: return kOr;
                case LogicOp::Implies: return kImplies;
                case LogicOp::Iff: return kIff;
            }
    }
    return kPrimary;
}

const char* spelling(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mod: return "mod";
    }
    return "?";
}

const char* spelling(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

const char* spelling(LogicOp op) {
    switch (op) {
        case LogicOp::Not: return "not";
        case LogicOp::And: return "and";
        case LogicOp::Or: return "or";
        case LogicOp::Implies: return "implies";
        case LogicOp::Iff: return "iff";
    }
    return "?";
}

void print_term_to(std::ostream& out, const Term& t, int min_prec);

void print_child(std::ostream& out, const Term& t, int min_prec) {
    if (precedence(t) < min_prec) {
        out << '(';
        print_term_to(out, t, 0);
        out << ')';
    } else {
        print_term_to(out, t, min_prec);
    }
}

void print_term_to(std::ostream& out, const Term& t, int /*min_prec*/) {
    const int p = precedence(t);
    switch (t.kind) {
        case TermKind::Literal:
            if (t.literal.kind == ValueKind::Boolean) out << (t.literal.as_bool() ? "true" : "false");
            else out << t.literal.raw;
            return;
        case TermKind::Apply:
            out << t.name;
            if (!t.operands.empty()) {
                out << '(';
                print_term_to(out, t.operands[0], 0);
                out << ')';
            }
            return;
        case TermKind::Variable:
            out << t.name;
            return;
        case TermKind::Arithmetic:
            print_child(out, t.operands[0], p);
            out << ' ' << spelling(t.arith) << ' ';
            print_child(out, t.operands[1], p + 1);
            return;
        case TermKind::Comparison:
            print_child(out, t.operands[0], p + 1);
            out << ' ' << spelling(t.compare) << ' ';
            print_child(out, t.operands[1], p + 1);
            return;
        case TermKind::Logical:
            if (t.logic == LogicOp::Not) {
                out << "not ";
                print_child(out, t.operands[0], p);
                return;
            }
            if (t.logic == LogicOp::Implies) {
                print_child(out, t.operands[0], p + 1);
                out << " implies ";
                print_child(out, t.operands[1], p);
                return;
            }
            print_child(out, t.operands[0], p);
            out << ' ' << spelling(t.logic) << ' ';
            print_child(out, t.operands[1], p + 1);
            return;
    }
}

// Formula precedence uses its own scale; atoms and unary operators bind
// tightest.
enum FPrec : int { fIff = 1, fImplies = 2, fOr = 3, fAnd = 4, fUntil = 5, fUnary = 6, fAtom = 7 };

int precedence(const Formula& f, FormulaStyle style) {
    switch (f.kind) {
        case FormulaKind::Atom: return fAtom;
        case FormulaKind::Not: return fUnary;
        case FormulaKind::And: return fAnd;
        case FormulaKind::Or: return fOr;
        case FormulaKind::Implies: return fImplies;
        case FormulaKind::Iff: return fIff;
        case FormulaKind::Temporal:
            // Infix until is always printed inside its own parentheses.
            (void)style;
            return fUnary;
    }
    return fAtom;
}

std::string lower(const char* s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void print_formula_to(std::ostream& out, const Formula& f, FormulaStyle style);

void print_fchild(std::ostream& out, const Formula& f, FormulaStyle style, int min_prec) {
    if (precedence(f, style) < min_prec) {
        out << '(';
        print_formula_to(out, f, style);
        out << ')';
    } else {
        print_formula_to(out, f, style);
    }
}

void print_formula_to(std::ostream& out, const Formula& f, FormulaStyle style) {
    const int p = precedence(f, style);
    switch (f.kind) {
        case FormulaKind::Atom:
            // Atoms are parsed at comparison level; anything looser needs parentheses.
            print_child(out, f.atom, kCompare);
            return;
        case FormulaKind::Not:
            out << "not ";
            print_fchild(out, f.operands[0], style, fUnary);
            return;
        case FormulaKind::Implies:
            print_fchild(out, f.operands[0], style, p + 1);
            out << " implies ";
            print_fchild(out, f.operands[1], style, p);
            return;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Iff: {
            const char* word = f.kind == FormulaKind::And ? "and" : f.kind == FormulaKind::Or ? "or" : "iff";
            print_fchild(out, f.operands[0], style, p);
            out << ' ' << word << ' ';
            print_fchild(out, f.operands[1], style, p + 1);
            return;
        }
        case FormulaKind::Temporal:
            break;
    }
    if (style == FormulaStyle::CallStyle) {
        out << lower(operator_name(f.temporal)) << '(';
        print_formula_to(out, f.operands[0], style);
        if (is_binary_operator(f.temporal)) {
            out << ", ";
            print_formula_to(out, f.operands[1], style);
        }
        out << ')';
        return;
    }
    switch (f.temporal) {
        case TemporalOp::AU:
        case TemporalOp::EU:
            out << (f.temporal == TemporalOp::AU ? "A[" : "E[");
            print_formula_to(out, f.operands[0], style);
            out << " U ";
            print_formula_to(out, f.operands[1], style);
            out << ']';
            return;
        case TemporalOp::U:
            out << '(';
            print_fchild(out, f.operands[0], style, fUnary);
            out << " U ";
            print_fchild(out, f.operands[1], style, fUnary);
            out << ')';
            return;
        default:
            out << operator_name(f.temporal) << '(';
            print_formula_to(out, f.operands[0], style);
            out << ')';
            return;
    }
}

std::string indent_str(int level) { return std::string(static_cast<std::size_t>(level) * 4, ' '); }

void print_rule_to(std::ostream& out, const Rule& r, int level) {
    const std::string pad = indent_str(level);
    switch (r.kind) {
        case RuleKind::Update:
            out << pad << print_term(r.location) << " := " << print_term(r.value) << '\n';
            return;
        case RuleKind::MacroCall:
            out << pad << r.macro << "[]\n";
            return;
        case RuleKind::Parallel:
            out << pad << "par\n";
            for (const auto& child : r.body) print_rule_to(out, child, level + 1);
            out << pad << "endpar\n";
            return;
        case RuleKind::Conditional:
            out << pad << "if " << print_term(r.guard) << " then\n";
            print_rule_to(out, r.body[0], level + 1);
            if (r.has_else()) {
                out << pad << "else\n";
                print_rule_to(out, r.body[1], level + 1);
            }
            out << pad << "endif\n";
            return;
    }
}

void print_definition(std::ostream& out, const FunctionDefinition& def) {
    out << "function " << def.function;
    if (def.parameter) out << '(' << *def.parameter << " in " << def.parameter_domain.value_or("") << ')';
    out << " = " << print_term(def.value);
}

}  // namespace

const char* to_string(Logic logic) { return logic == Logic::CTL ? "CTL" : "LTL"; }

std::string print_term(const Term& term) {
    std::ostringstream out;
    print_term_to(out, term, 0);
    return out.str();
}

std::string print_formula(const Formula& formula, FormulaStyle style) {
    std::ostringstream out;
    print_formula_to(out, formula, style);
    return out.str();
}

std::string print_rule(const Rule& rule, int indent) {
    std::ostringstream out;
    print_rule_to(out, rule, indent);
    return out.str();
}

std::string print_asm(const AsmSpecification& spec) {
    std::ostringstream out;
    out << "asm " << spec.name << "\n\n";
    for (const auto& imp : spec.imports) out << "import " << imp << '\n';
    if (!spec.imports.empty()) out << '\n';

    out << "signature:\n";
    for (const auto& d : spec.domains) {
        if (d.kind == DomainKind::Enumeration) {
            out << "    enum domain " << d.name << " = {";
            for (std::size_t i = 0; i < d.values.size(); ++i) out << (i ? " | " : "") << d.values[i];
            out << "}\n";
        } else if (d.kind == DomainKind::IntegerRange) {
            out << "    domain " << d.name << " subsetof Integer\n";
        }
    }
    for (const auto& f : spec.functions) {
        out << "    " << to_string(f.kind) << ' ' << f.name << ": ";
        if (f.arg_domain) out << *f.arg_domain << " -> ";
        out << f.result_domain << '\n';
    }

    out << "\ndefinitions:\n";
    bool wrote_domain = false;
    for (const auto& d : spec.domains) {
        if (d.kind != DomainKind::IntegerRange) continue;
        out << "    domain " << d.name << " = {" << d.lo << " : " << d.hi << "}\n";
        wrote_domain = true;
    }
    if (wrote_domain) out << '\n';
    for (const auto& def : spec.definitions) {
        out << "    ";
        print_definition(out, def);
        out << '\n';
    }
    if (!spec.definitions.empty()) out << '\n';
    for (const auto& r : spec.macro_rules) {
        out << "    macro rule " << r.name << " =\n";
        print_rule_to(out, r.body, 2);
        out << '\n';
    }
    for (const auto& prop : spec.properties) {
        out << "    " << (prop.logic == Logic::CTL ? "CTLSPEC " : "LTLSPEC ")
            << print_formula(prop.formula, FormulaStyle::CallStyle) << '\n';
    }
    if (!spec.properties.empty()) out << '\n';
    out << "    main rule " << spec.main_rule.name << " =\n";
    print_rule_to(out, spec.main_rule.body, 2);

    out << "\ndefault init " << spec.init_name << ":\n";
    for (const auto& def : spec.init) {
        out << "    ";
        print_definition(out, def);
        out << '\n';
    }
    return out.str();
}

std::string print_avalla(const AvallaScenario& scenario) {
    std::ostringstream out;
    out << "scenario " << scenario.name << '\n';
    out << "load " << scenario.load << '\n';
    for (const auto& c : scenario.commands) {
        switch (c.kind) {
            case CommandKind::Set:
                out << "set " << print_term(c.location) << " := " << print_term(c.value) << ";\n";
                break;
            case CommandKind::Step:
                out << "step;\n";
                break;
            case CommandKind::Check:
                out << "check " << print_term(c.condition) << ";\n";
                break;
            case CommandKind::LoopMarker:
                out << "// @loop-start step " << c.loop_step << '\n';
                break;
        }
    }
    return out.str();
}

}  // namespace asmprop
