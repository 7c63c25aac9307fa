#include "asmprop/smv.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "asmprop/checker.hpp"
#include "asmprop/interpreter.hpp"
#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

const std::set<std::string> kSmvReserved = {
    "MODULE", "VAR", "IVAR", "FROZENVAR", "DEFINE", "CONSTANTS", "ASSIGN", "INIT", "TRANS",
    "INVAR", "SPEC", "CTLSPEC", "LTLSPEC", "PSLSPEC", "INVARSPEC", "COMPUTE", "FAIRNESS",
    "JUSTICE", "COMPASSION", "ISA", "PRED", "MIRROR", "NAME", "init", "next", "case", "esac",
    "TRUE", "FALSE", "mod", "xor", "xnor", "self", "process", "boolean", "integer", "real",
    "word", "array", "of", "union", "in", "count", "toint", "bool", "signed", "unsigned",
    "extend", "resize", "sizeof", "floor", "typeof", "A", "E", "F", "G", "X", "U", "V", "Y",
    "Z", "O", "H", "S", "T", "B", "W", "AG", "AF", "AX", "EG", "EF", "EX", "AU", "EU", "ABF",
    "ABG", "EBF", "EBG", "MIN", "MAX", "MDEFINE", "READ", "WRITE", "CONSTARRAY", "set"};

bool plain_lower(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

bool plain_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string hex4(std::uint32_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(4, '0');
    for (int i = 3; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

std::string mangle(const std::string& name) {
    std::uint32_t hash = 2166136261u;
    for (char c : name) hash = (hash ^ static_cast<unsigned char>(c)) * 16777619u;
    std::string base;
    for (char c : name) {
        auto u = static_cast<unsigned char>(c);
        base += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
    }
    if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base = "v_" + base;
    return base + "_" + hex4((hash >> 16) ^ (hash & 0xffff));
}

std::string enum_identifier(const std::string& value) {
    if (plain_identifier(value) && !kSmvReserved.count(value)) return value;
    return mangle(value);
}

// SMV operator levels, loosest first.
enum Level : int { kImplies = 1, kIff = 2, kOr = 3, kAnd = 4, kCompare = 5, kAdd = 6, kMod = 7, kUnary = 8, kAtom = 9 };

struct Expr {
    std::string text;
    int level = kAtom;
};

std::string wrap(const Expr& e, int min_level) { return e.level < min_level ? "(" + e.text + ")" : e.text; }

Expr negated(const Expr& e) { return {"!" + wrap(e, kUnary), kUnary}; }

class Emitter {
public:
    Emitter(const Machine& machine) : m_(machine), sig_(machine.signature()) {}

    std::string function_name(const FunctionDecl& f, std::optional<std::size_t> arg_index) const {
        std::string base = smv_identifier(f.name);
        if (arg_index) base += "_a" + std::to_string(*arg_index);
        return base;
    }

    std::string literal(const Value& v, const DomainDecl& d) const {
        switch (v.kind) {
            case ValueKind::Boolean: return v.as_bool() ? "TRUE" : "FALSE";
            case ValueKind::Integer: return std::to_string(v.raw);
            case ValueKind::Enumeration: return enum_identifier(sig_.format_value(v, d));
        }
        return "?";
    }

    /// Constant value of an argument term when it does not depend on the state.
    std::optional<Value> constant(const Term& t) const {
        if (t.kind == TermKind::Literal) return t.literal;
        if (t.kind == TermKind::Variable) {
            for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
                if (it->first == t.name) return it->second;
        }
        if (t.kind == TermKind::Apply && !t.has_argument() && !sig_.function(t.name))
            if (auto ec = sig_.enum_constant(t.name)) return Value::enumeration(ec->index);
        return std::nullopt;
    }

    Expr lower(const Term& t) {
        switch (t.kind) {
            case TermKind::Literal:
                if (t.literal.kind == ValueKind::Boolean) return {t.literal.as_bool() ? "TRUE" : "FALSE"};
                if (t.literal.raw < 0) return {"-" + std::to_string(-t.literal.raw), kUnary};
                return {std::to_string(t.literal.raw)};
            case TermKind::Variable: {
                for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
                    if (it->first == t.name) return {binding_text_.at(t.name)};
                throw Error(ErrorKind::UnsupportedConstruct, "unbound variable '" + t.name + "'");
            }
            case TermKind::Apply:
                return lower_apply(t);
            case TermKind::Arithmetic: {
                const bool mod = t.arith == ArithOp::Mod;
                const int level = mod ? kMod : kAdd;
                Expr a = lower(t.operands[0]);
                Expr b = lower(t.operands[1]);
                const char* op = t.arith == ArithOp::Add ? " + " : t.arith == ArithOp::Sub ? " - " : " mod ";
                return {wrap(a, level) + op + wrap(b, level + 1), level};
            }
            case TermKind::Comparison: {
                static const char* ops[] = {" = ", " != ", " < ", " <= ", " > ", " >= "};
                Expr a = lower(t.operands[0]);
                Expr b = lower(t.operands[1]);
                return {wrap(a, kCompare + 1) + ops[static_cast<int>(t.compare)] + wrap(b, kCompare + 1), kCompare};
            }
            case TermKind::Logical: {
                if (t.logic == LogicOp::Not) return negated(lower(t.operands[0]));
                Expr a = lower(t.operands[0]);
                Expr b = lower(t.operands[1]);
                return connective(t.logic, a, b);
            }
        }
        throw Error(ErrorKind::UnsupportedConstruct, "cannot translate '" + print_term(t) + "'");
    }

    static Expr connective(LogicOp op, const Expr& a, const Expr& b) {
        switch (op) {
            case LogicOp::And: return {wrap(a, kAnd) + " & " + wrap(b, kAnd + 1), kAnd};
            case LogicOp::Or: return {wrap(a, kOr) + " | " + wrap(b, kOr + 1), kOr};
            case LogicOp::Implies: return {wrap(a, kImplies + 1) + " -> " + wrap(b, kImplies), kImplies};
            case LogicOp::Iff: return {wrap(a, kIff + 1) + " <-> " + wrap(b, kIff + 1), kIff};
            case LogicOp::Not: break;
        }
        return negated(a);
    }

    Expr lower_apply(const Term& t) {
        const FunctionDecl* f = sig_.function(t.name);
        if (!f) {
            auto ec = sig_.enum_constant(t.name);
            return {literal(Value::enumeration(ec->index), *ec->domain)};
        }
        if (!t.has_argument()) return {function_name(*f, std::nullopt)};
        const DomainDecl* ad = sig_.domain(*f->arg_domain);
        const auto elements = ad->elements();
        if (auto c = constant(t.operands[0])) {
            for (std::size_t i = 0; i < elements.size(); ++i)
                if (elements[i] == *c) return {function_name(*f, i)};
            throw Error(ErrorKind::DomainViolation, "argument of '" + print_term(t) + "' outside " + ad->name);
        }
        // Select the unrolled variable by the argument's value.
        Expr arg = lower(t.operands[0]);
        std::string text = "case ";
        for (std::size_t i = 0; i < elements.size(); ++i) {
            if (i + 1 == elements.size()) text += "TRUE : " + function_name(*f, i) + "; ";
            else text += wrap(arg, kCompare + 1) + " = " + literal(elements[i], *ad) + " : " + function_name(*f, i) + "; ";
        }
        return {text + "esac"};
    }

    Expr lower_formula(const Formula& f) {
        switch (f.kind) {
            case FormulaKind::Atom: return lower(f.atom);
            case FormulaKind::Not: return negated(lower_formula(f.operands[0]));
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::Implies:
            case FormulaKind::Iff: {
                Expr a = lower_formula(f.operands[0]);
                Expr b = lower_formula(f.operands[1]);
                LogicOp op = f.kind == FormulaKind::And       ? LogicOp::And
                             : f.kind == FormulaKind::Or      ? LogicOp::Or
                             : f.kind == FormulaKind::Implies ? LogicOp::Implies
                                                              : LogicOp::Iff;
                return connective(op, a, b);
            }
            case FormulaKind::Temporal:
                break;
        }
        Expr a = lower_formula(f.operands[0]);
        switch (f.temporal) {
            case TemporalOp::AU:
            case TemporalOp::EU: {
                Expr b = lower_formula(f.operands[1]);
                return {std::string(f.temporal == TemporalOp::AU ? "A[" : "E[") + a.text + " U " + b.text + "]"};
            }
            case TemporalOp::U: {
                Expr b = lower_formula(f.operands[1]);
                return {"(" + wrap(a, kAtom) + " U " + wrap(b, kAtom) + ")"};
            }
            default:
                return {std::string(operator_name(f.temporal)) + "(" + a.text + ")"};
        }
    }

    void bind(const std::string& var, const Value& v, const DomainDecl& d) {
        bindings_.emplace_back(var, v);
        binding_text_[var] = literal(v, d);
    }
    void unbind() {
        binding_text_.erase(bindings_.back().first);
        bindings_.pop_back();
    }

    struct Branch {
        std::vector<Expr> guards;
        Expr value;
    };

    void collect(const Rule& r, std::vector<Expr>& guards, std::map<std::size_t, std::vector<Branch>>& out) {
        switch (r.kind) {
            case RuleKind::Update: {
                const FunctionDecl* f = sig_.function(r.location.name);
                Expr value = lower(r.value);
                if (!r.location.has_argument()) {
                    out[*m_.layout().find(f->name)].push_back({guards, value});
                    return;
                }
                const DomainDecl* ad = sig_.domain(*f->arg_domain);
                if (auto c = constant(r.location.operands[0])) {
                    auto slot = m_.layout().find(f->name, *c);
                    if (!slot) throw Error(ErrorKind::DomainViolation, "update outside domain of '" + f->name + "'");
                    out[*slot].push_back({guards, value});
                    return;
                }
                Expr arg = lower(r.location.operands[0]);
                for (const auto& v : ad->elements()) {
                    auto g = guards;
                    g.push_back({wrap(arg, kCompare + 1) + " = " + literal(v, *ad), kCompare});
                    out[*m_.layout().find(f->name, v)].push_back({std::move(g), value});
                }
                return;
            }
            case RuleKind::Parallel:
                for (const auto& child : r.body) collect(child, guards, out);
                return;
            case RuleKind::Conditional: {
                Expr g = lower(r.guard);
                guards.push_back(g);
                collect(r.body[0], guards, out);
                guards.pop_back();
                if (r.has_else()) {
                    guards.push_back(negated(g));
                    collect(r.body[1], guards, out);
                    guards.pop_back();
                }
                return;
            }
            case RuleKind::MacroCall:
                collect(m_.spec().find_macro(r.macro)->body, guards, out);
                return;
        }
    }

private:
    const Machine& m_;
    const Signature& sig_;
    std::vector<std::pair<std::string, Value>> bindings_;
    std::map<std::string, std::string> binding_text_;
};

std::string conjunction(const std::vector<Expr>& guards) {
    if (guards.size() == 1) return guards.front().text;
    std::string out;
    for (std::size_t i = 0; i < guards.size(); ++i) {
        if (i) out += " & ";
        out += wrap(guards[i], kAnd + (i ? 1 : 0));
    }
    return out;
}

}  // namespace

std::string smv_identifier(const std::string& name) {
    if (plain_lower(name) && !kSmvReserved.count(name)) return name;
    return mangle(name);
}

SmvModel emit_smv(const AsmSpecification& spec, const SmvOptions& options) {
    auto machine = Machine::create(spec);
    const Signature& sig = machine->signature();
    const StateLayout& layout = machine->layout();

    try {
        Limits limits;
        limits.max_states = options.prescan_states;
        limits.max_time = std::chrono::milliseconds(30'000);
        build_kripke(machine, limits);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InconsistentUpdate)
            throw Error(ErrorKind::UnsupportedConstruct,
                        std::string("cannot translate to SMV: ") + e.what());
    }

    Emitter em(*machine);
    SmvModel model;

    // Injectivity of the name mapping, including enumeration constants.
    std::map<std::string, std::string> owner;
    auto claim = [&](const std::string& smv, const std::string& what) {
        auto [it, inserted] = owner.emplace(smv, what);
        if (!inserted && it->second != what)
            throw Error(ErrorKind::UnsupportedConstruct, "name collision after sanitization: " + it->second +
                                                             " and " + what + " both map to '" + smv + "'");
    };
    for (const auto& d : sig.domains())
        for (const auto& v : d.values) claim(enum_identifier(v), "enumeration value '" + v + "'");

    std::ostringstream var, define, assign;
    auto type_of = [&](const DomainDecl& d) {
        switch (d.kind) {
            case DomainKind::Boolean: return std::string("boolean");
            case DomainKind::IntegerRange: return std::to_string(d.lo) + ".." + std::to_string(d.hi);
            case DomainKind::Enumeration: {
                std::string out = "{";
                for (std::size_t i = 0; i < d.values.size(); ++i)
                    out += (i ? ", " : "") + enum_identifier(d.values[i]);
                return out + "}";
            }
        }
        return std::string();
    };

    std::map<std::size_t, std::string> slot_names;
    for (const auto& f : sig.functions()) {
        const DomainDecl* rd = sig.domain(f.result_domain);
        std::vector<std::pair<std::optional<std::size_t>, std::optional<Value>>> instances;
        if (f.arg_domain) {
            auto args = sig.domain(*f.arg_domain)->elements();
            for (std::size_t i = 0; i < args.size(); ++i) instances.emplace_back(i, args[i]);
        } else {
            instances.emplace_back(std::nullopt, std::nullopt);
        }
        for (const auto& [index, arg] : instances) {
            const std::string name = em.function_name(f, index);
            claim(name, "function '" + f.name + "'" + (arg ? " at " + sig.format_value(*arg, *sig.domain(*f.arg_domain)) : ""));
            if (f.kind == FunctionKind::Static || f.kind == FunctionKind::Derived) {
                const FunctionDefinition* def = sig.definition(f.name);
                if (def->parameter) em.bind(*def->parameter, *arg, *sig.domain(*f.arg_domain));
                define << "    " << name << " := " << em.lower(def->value).text << ";\n";
                if (def->parameter) em.unbind();
                continue;
            }
            var << "    " << name << " : " << type_of(*rd) << ";\n";
            slot_names[*layout.find(f.name, arg)] = name;
        }
    }
    for (std::size_t i = 0; i < layout.size(); ++i) model.var_map.emplace_back(layout.slot(i).label, slot_names.at(i));

    // init
    for (std::size_t i = 0; i < layout.controlled_count(); ++i) {
        const Location& loc = layout.slot(i);
        for (const auto& entry : spec.init) {
            if (entry.function != loc.function) continue;
            const FunctionDecl* f = sig.function(loc.function);
            if (entry.parameter) em.bind(*entry.parameter, *loc.argument, *sig.domain(*f->arg_domain));
            assign << "    init(" << slot_names.at(i) << ") := " << em.lower(entry.value).text << ";\n";
            if (entry.parameter) em.unbind();
        }
    }

    // next
    std::map<std::size_t, std::vector<Emitter::Branch>> branches;
    std::vector<Expr> guards;
    em.collect(spec.main_rule.body, guards, branches);
    for (std::size_t i = 0; i < layout.controlled_count(); ++i) {
        const std::string& name = slot_names.at(i);
        auto it = branches.find(i);
        if (it == branches.end()) {
            assign << "    next(" << name << ") := " << name << ";\n";
            continue;
        }
        const auto& list = it->second;
        if (list.front().guards.empty()) {
            assign << "    next(" << name << ") := " << list.front().value.text << ";\n";
            continue;
        }
        assign << "    next(" << name << ") :=\n        case\n";
        bool closed = false;
        for (const auto& b : list) {
            if (b.guards.empty()) {
                assign << "            TRUE : " << b.value.text << ";\n";
                closed = true;
                break;
            }
            assign << "            " << conjunction(b.guards) << " : " << b.value.text << ";\n";
        }
        if (!closed) assign << "            TRUE : " << name << ";\n";
        assign << "        esac;\n";
    }

    std::ostringstream out;
    out << "-- " << spec.name << "\n";
    out << "MODULE main\n";
    out << "VAR\n" << var.str();
    if (!define.str().empty()) out << "DEFINE\n" << define.str();
    out << "ASSIGN\n" << assign.str();
    for (const auto& p : spec.properties) {
        std::string line = (p.logic == Logic::CTL ? "SPEC " : "LTLSPEC ") + em.lower_formula(p.formula).text;
        out << line << '\n';
        model.property_lines.emplace_back(p, line);
    }
    model.text = out.str();
    return model;
}

// ---------------------------------------------------------------------------
// SMV subset reader

const SmvVar* SmvProgram::var(const std::string& name) const {
    for (const auto& v : vars)
        if (v.name == name) return &v;
    return nullptr;
}

namespace {

struct SmvToken {
    enum class Kind { Identifier, Integer, Symbol, End } kind = Kind::End;
    std::string text;
    SourcePos pos;
};

struct SmvFailure {
    std::string code;
    std::string message;
    SourcePos pos;
};

std::vector<SmvToken> smv_tokens(const std::string& text) {
    std::vector<SmvToken> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto bump = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump(1);
            continue;
        }
        if (text.compare(i, 2, "--") == 0) {
            while (i < text.size() && text[i] != '\n') bump(1);
            continue;
        }
        SmvToken t;
        t.pos = {line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            t.kind = SmvToken::Kind::Identifier;
            t.text = text.substr(i, j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = SmvToken::Kind::Integer;
            t.text = text.substr(i, j - i);
        } else {
            t.kind = SmvToken::Kind::Symbol;
            for (const char* op : {"<->", ":=", "..", "->", "!=", "<=", ">="})
                if (text.compare(i, std::char_traits<char>::length(op), op) == 0) {
                    t.text = op;
                    break;
                }
            if (t.text.empty()) {
                if (std::string("()[]{}:;,=<>+-!&|").find(c) == std::string::npos)
                    throw SmvFailure{"smv-syntax", std::string("unexpected character '") + c + "'", t.pos};
                t.text = std::string(1, c);
            }
        }
        bump(t.text.size());
        out.push_back(std::move(t));
    }
    SmvToken end;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

const std::set<std::string> kSections = {"MODULE", "VAR", "DEFINE", "ASSIGN", "SPEC", "CTLSPEC", "LTLSPEC"};
const std::set<std::string> kUnaryTemporal = {"AG", "AF", "AX", "EG", "EF", "EX", "G", "F", "X"};

class SmvParser {
public:
    explicit SmvParser(std::vector<SmvToken> tokens) : toks_(std::move(tokens)) {}

    SmvProgram program() {
        SmvProgram p;
        expect("MODULE");
        expect("main");
        while (peek().kind != SmvToken::Kind::End) {
            const SmvToken& t = peek();
            if (accept("VAR")) {
                while (!section_start()) p.vars.push_back(var_decl());
            } else if (accept("DEFINE")) {
                while (!section_start()) {
                    std::string name = identifier();
                    expect(":=");
                    SmvExpr e = expr();
                    expect(";");
                    p.defines.emplace_back(name, std::move(e));
                }
            } else if (accept("ASSIGN")) {
                while (!section_start()) {
                    const SmvToken& which = peek();
                    bool is_init = false;
                    if (accept("init")) is_init = true;
                    else if (!accept("next")) fail("expected 'init' or 'next'", which.pos);
                    expect("(");
                    std::string name = identifier();
                    expect(")");
                    expect(":=");
                    SmvExpr e = expr();
                    expect(";");
                    auto& target = is_init ? p.init : p.next;
                    if (!target.emplace(name, std::move(e)).second)
                        throw SmvFailure{"smv-duplicate-assign",
                                         std::string(is_init ? "init" : "next") + "(" + name + ") assigned twice",
                                         which.pos};
                }
            } else if (t.text == "SPEC" || t.text == "CTLSPEC" || t.text == "LTLSPEC") {
                std::string kw = advance().text;
                SmvExpr e = expr();
                accept(";");
                p.specs.emplace_back(kw, std::move(e));
            } else {
                fail("expected a section keyword, found '" + t.text + "'", t.pos);
            }
        }
        return p;
    }

private:
    const SmvToken& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const SmvToken& advance() {
        const SmvToken& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool accept(const std::string& text) {
        if (peek().kind != SmvToken::Kind::End && peek().text == text) {
            advance();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& message, SourcePos pos) { throw SmvFailure{"smv-syntax", message, pos}; }
    void expect(const std::string& text) {
        if (!accept(text)) {
            const SmvToken& t = peek();
            fail("expected '" + text + "', found " + (t.kind == SmvToken::Kind::End ? "end of input" : "'" + t.text + "'"),
                 t.pos);
        }
    }
    bool section_start() const {
        return peek().kind == SmvToken::Kind::End ||
               (peek().kind == SmvToken::Kind::Identifier && kSections.count(peek().text));
    }
    std::string identifier() {
        const SmvToken& t = peek();
        if (t.kind != SmvToken::Kind::Identifier) fail("expected an identifier", t.pos);
        return advance().text;
    }
    std::int64_t integer() {
        bool negative = accept("-");
        const SmvToken& t = peek();
        if (t.kind != SmvToken::Kind::Integer) fail("expected an integer", t.pos);
        std::int64_t v = std::stoll(advance().text);
        return negative ? -v : v;
    }

    SmvVar var_decl() {
        SmvVar v;
        v.name = identifier();
        expect(":");
        if (accept("boolean")) {
            v.type = SmvVar::Type::Boolean;
        } else if (accept("{")) {
            v.type = SmvVar::Type::Enumeration;
            do v.values.push_back(identifier());
            while (accept(","));
            expect("}");
        } else {
            v.type = SmvVar::Type::Range;
            v.lo = integer();
            expect("..");
            v.hi = integer();
        }
        expect(";");
        return v;
    }

    SmvExpr binary(std::string op, SmvExpr a, SmvExpr b, SourcePos pos) {
        SmvExpr e;
        e.kind = SmvExpr::Kind::Binary;
        e.text = std::move(op);
        e.operands = {std::move(a), std::move(b)};
        e.pos = pos;
        return e;
    }

    SmvExpr expr() { return implies(); }
    SmvExpr implies() {
        SmvExpr lhs = iff();
        if (peek().text == "->") {
            auto pos = advance().pos;
            return binary("->", std::move(lhs), implies(), pos);
        }
        return lhs;
    }
    SmvExpr iff() {
        SmvExpr lhs = disjunction();
        while (peek().text == "<->") {
            auto pos = advance().pos;
            lhs = binary("<->", std::move(lhs), disjunction(), pos);
        }
        return lhs;
    }
    SmvExpr disjunction() {
        SmvExpr lhs = conjunction_();
        while (peek().text == "|") {
            auto pos = advance().pos;
            lhs = binary("|", std::move(lhs), conjunction_(), pos);
        }
        return lhs;
    }
    SmvExpr conjunction_() {
        SmvExpr lhs = comparison();
        while (peek().text == "&") {
            auto pos = advance().pos;
            lhs = binary("&", std::move(lhs), comparison(), pos);
        }
        return lhs;
    }
    SmvExpr comparison() {
        SmvExpr lhs = additive();
        static const std::set<std::string> ops = {"=", "!=", "<", "<=", ">", ">="};
        if (peek().kind == SmvToken::Kind::Symbol && ops.count(peek().text)) {
            auto op = peek().text;
            auto pos = advance().pos;
            return binary(op, std::move(lhs), additive(), pos);
        }
        return lhs;
    }
    SmvExpr additive() {
        SmvExpr lhs = modulo();
        while (peek().kind == SmvToken::Kind::Symbol && (peek().text == "+" || peek().text == "-")) {
            auto op = peek().text;
            auto pos = advance().pos;
            lhs = binary(op, std::move(lhs), modulo(), pos);
        }
        return lhs;
    }
    SmvExpr modulo() {
        SmvExpr lhs = unary();
        while (peek().text == "mod") {
            auto pos = advance().pos;
            lhs = binary("mod", std::move(lhs), unary(), pos);
        }
        return lhs;
    }
    SmvExpr unary() {
        if (peek().text == "!" || peek().text == "-") {
            SmvExpr e;
            e.kind = SmvExpr::Kind::Unary;
            e.pos = peek().pos;
            e.text = advance().text;
            e.operands.push_back(unary());
            return e;
        }
        return primary();
    }
    SmvExpr primary() {
        const SmvToken& t = peek();
        SmvExpr e;
        e.pos = t.pos;
        if (t.kind == SmvToken::Kind::Integer) {
            e.kind = SmvExpr::Kind::Integer;
            e.number = std::stoll(advance().text);
            return e;
        }
        if (accept("(")) {
            SmvExpr inner = expr();
            if (accept("U")) {
                SmvExpr until;
                until.kind = SmvExpr::Kind::Until;
                until.text = "U";
                until.pos = e.pos;
                until.operands = {std::move(inner), expr()};
                inner = std::move(until);
            }
            expect(")");
            return inner;
        }
        if (t.kind != SmvToken::Kind::Identifier) fail("expected an expression, found '" + t.text + "'", t.pos);
        if (t.text == "TRUE" || t.text == "FALSE") {
            e.kind = SmvExpr::Kind::Boolean;
            e.number = advance().text == "TRUE";
            return e;
        }
        if (t.text == "case") {
            advance();
            e.kind = SmvExpr::Kind::Case;
            do {
                e.operands.push_back(expr());
                expect(":");
                e.operands.push_back(expr());
                expect(";");
            } while (peek().text != "esac" && !section_start());
            expect("esac");
            return e;
        }
        if (t.text == "next" && peek(1).text == "(") {
            advance();
            expect("(");
            e.kind = SmvExpr::Kind::Next;
            e.text = identifier();
            expect(")");
            return e;
        }
        if (kUnaryTemporal.count(t.text) && peek(1).text == "(") {
            e.kind = SmvExpr::Kind::Temporal;
            e.text = advance().text;
            e.operands.push_back(unary());
            return e;
        }
        if ((t.text == "A" || t.text == "E") && peek(1).text == "[") {
            e.kind = SmvExpr::Kind::Temporal;
            e.text = advance().text + "U";
            expect("[");
            e.operands.push_back(expr());
            expect("U");
            e.operands.push_back(expr());
            expect("]");
            return e;
        }
        if (kSections.count(t.text) || t.text == "esac") fail("unexpected keyword '" + t.text + "'", t.pos);
        e.kind = SmvExpr::Kind::Identifier;
        e.text = advance().text;
        return e;
    }

    std::vector<SmvToken> toks_;
    std::size_t pos_ = 0;
};

void collect_identifiers(const SmvExpr& e, std::vector<const SmvExpr*>& out) {
    if (e.kind == SmvExpr::Kind::Identifier || e.kind == SmvExpr::Kind::Next) out.push_back(&e);
    for (const auto& sub : e.operands) collect_identifiers(sub, out);
}

}  // namespace

Result<SmvProgram> parse_smv(const std::string& text) {
    try {
        SmvParser parser(smv_tokens(text));
        return parser.program();
    } catch (const SmvFailure& f) {
        Diagnostics d;
        d.error(f.code, f.message, f.pos);
        return d;
    }
}

Diagnostics emitted_roundtrip_check(const SmvModel& model) {
    auto parsed = parse_smv(model.text);
    if (!parsed) return parsed.diagnostics();
    const SmvProgram& p = *parsed;
    Diagnostics diags;
    std::set<std::string> known, vars;
    for (const auto& v : p.vars) {
        if (!known.insert(v.name).second) diags.error("smv-duplicate-variable", "variable '" + v.name + "' declared twice");
        vars.insert(v.name);
        for (const auto& c : v.values) known.insert(c);
    }
    for (const auto& [name, e] : p.defines) known.insert(name);
    for (const auto& [label, name] : model.var_map)
        if (!vars.count(name))
            diags.error("undeclared-variable", "variable '" + name + "' for location '" + label + "' is not declared");
    auto check = [&](const SmvExpr& e) {
        std::vector<const SmvExpr*> ids;
        collect_identifiers(e, ids);
        for (const auto* id : ids)
            if (!known.count(id->text)) diags.error("undeclared-variable", "undeclared identifier '" + id->text + "'", id->pos);
    };
    for (const auto& [name, e] : p.defines) check(e);
    for (const auto* table : {&p.init, &p.next})
        for (const auto& [name, e] : *table) {
            if (!vars.count(name)) diags.error("undeclared-variable", "assignment to undeclared variable '" + name + "'");
            check(e);
        }
    for (const auto& [kw, e] : p.specs) check(e);
    return diags;
}

SmvValue smv_evaluate(const SmvProgram& program, const SmvExpr& e, const SmvValuation& current) {
    auto num = [&](const SmvExpr& sub) { return smv_evaluate(program, sub, current).number; };
    switch (e.kind) {
        case SmvExpr::Kind::Integer:
        case SmvExpr::Kind::Boolean:
            return {e.number, {}};
        case SmvExpr::Kind::Identifier: {
            if (auto it = current.find(e.text); it != current.end()) return it->second;
            for (const auto& [name, def] : program.defines)
                if (name == e.text) return smv_evaluate(program, def, current);
            for (const auto& v : program.vars)
                for (const auto& c : v.values)
                    if (c == e.text) return {0, c};
            throw Error(ErrorKind::UnknownLocation, "unknown SMV identifier '" + e.text + "'");
        }
        case SmvExpr::Kind::Unary:
            return e.text == "!" ? SmvValue{num(e.operands[0]) ? 0 : 1, {}} : SmvValue{-num(e.operands[0]), {}};
        case SmvExpr::Kind::Binary: {
            const std::string& op = e.text;
            if (op == "=" || op == "!=") {
                bool eq = smv_evaluate(program, e.operands[0], current) == smv_evaluate(program, e.operands[1], current);
                return {(op == "=") == eq ? 1 : 0, {}};
            }
            std::int64_t a = num(e.operands[0]);
            if (op == "&") return {a && num(e.operands[1]) ? 1 : 0, {}};
            if (op == "|") return {a || num(e.operands[1]) ? 1 : 0, {}};
            if (op == "->") return {!a || num(e.operands[1]) ? 1 : 0, {}};
            std::int64_t b = num(e.operands[1]);
            if (op == "<->") return {(a != 0) == (b != 0) ? 1 : 0, {}};
            if (op == "<") return {a < b, {}};
            if (op == "<=") return {a <= b, {}};
            if (op == ">") return {a > b, {}};
            if (op == ">=") return {a >= b, {}};
            if (op == "+") return {a + b, {}};
            if (op == "-") return {a - b, {}};
            if (op == "mod") {
                if (b == 0) throw Error(ErrorKind::DivisionByZero, "mod by zero");
                std::int64_t m = b < 0 ? -b : b;
                std::int64_t r = a % m;
                return {r < 0 ? r + m : r, {}};
            }
            break;
        }
        case SmvExpr::Kind::Case:
            for (std::size_t i = 0; i + 1 < e.operands.size(); i += 2)
                if (num(e.operands[i])) return smv_evaluate(program, e.operands[i + 1], current);
            throw Error(ErrorKind::Precondition, "no case branch applies");
        default:
            break;
    }
    throw Error(ErrorKind::Precondition, "expression cannot be evaluated on a single state");
}

SmvValuation smv_step(const SmvProgram& program, const SmvValuation& current) {
    SmvValuation next = current;
    for (const auto& [name, e] : program.next) next[name] = smv_evaluate(program, e, current);
    return next;
}

}  // namespace asmprop
