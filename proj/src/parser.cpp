#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "asmprop/syntax.hpp"
#include "lexer.hpp"

namespace asmprop {

namespace {

using detail::Token;
using detail::TokenKind;

constexpr std::string_view kLoopMarkerPrefix = "// @loop-start";

struct SyntaxFailure {
    Diagnostic diagnostic;
};

const std::set<std::string, std::less<>> kReserved = {
    "and", "or", "not", "implies", "iff", "xor", "mod", "true", "false", "if", "then",
    "else", "endif", "par", "endpar", "seq", "endseq", "choose", "forall", "exist",
    "let", "in", "do", "with", "undef", "skip", "extend", "switch", "case", "endswitch",
    "definitions", "signature", "macro", "main", "rule", "function", "domain", "default",
    "init", "asm", "import", "export", "CTLSPEC", "LTLSPEC", "invariant", "over",
};

// Keywords that belong to AsmetaL but fall outside the supported subset.
const std::set<std::string, std::less<>> kUnsupportedRuleKeywords = {
    "seq", "choose", "forall", "let", "extend", "skip", "iterate", "while",
    "switch", "case", "local", "undef", "exist", "abstract",
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string_view source)
        : tokens_(std::move(tokens)), source_(source) {}

    // --- token helpers ----------------------------------------------------
    const Token& peek(std::size_t k = 0) const {
        return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
    }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokenKind::End; }
    bool accept(std::string_view s) {
        if (peek().is(s)) {
            next();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& code, const std::string& message,
                           SourcePos pos) const {
        Diagnostic d;
        d.code = code;
        d.message = message;
        if (pos.known()) d.location = pos;
        throw SyntaxFailure{d};
    }
    [[noreturn]] void fail_here(const std::string& message) const {
        fail("syntax-error", message + ", found " + describe(peek()), peek().pos);
    }
    [[noreturn]] void unsupported(const std::string& construct, SourcePos pos) const {
        fail("unsupported-construct", "unsupported construct: " + construct, pos);
    }

    static std::string describe(const Token& t) {
        if (t.kind == TokenKind::End) return "end of input";
        return "'" + t.text + "'";
    }

    const Token& expect(std::string_view s) {
        if (!peek().is(s)) fail_here("expected '" + std::string(s) + "'");
        return next();
    }

    std::string identifier(const std::string& what) {
        const Token& t = peek();
        if (t.kind != TokenKind::Identifier || t.text.front() == '$' || kReserved.count(t.text)) {
            if (t.kind == TokenKind::Identifier && kUnsupportedRuleKeywords.count(t.text))
                unsupported(t.text, t.pos);
            fail_here("expected " + what);
        }
        return next().text;
    }

    std::int64_t integer_literal() {
        const Token& t = peek();
        if (t.kind != TokenKind::Integer) fail_here("expected integer literal");
        std::int64_t v = 0;
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        next();
        return v;
    }

    std::size_t mark() const { return pos_; }
    void reset(std::size_t m) { pos_ = m; }
    std::size_t last_end() const { return pos_ == 0 ? 0 : tokens_[pos_ - 1].end; }

    // --- terms ------------------------------------------------------------
    Term term() { return term_iff(); }

    Term term_iff() {
        Term lhs = term_implies();
        while (peek().is("iff")) {
            auto p = next().pos;
            lhs = Term::connective(LogicOp::Iff, std::move(lhs), term_implies(), p);
        }
        return lhs;
    }

    Term term_implies() {
        Term lhs = term_or();
        if (peek().is("implies")) {
            auto p = next().pos;
            return Term::connective(LogicOp::Implies, std::move(lhs), term_implies(), p);
        }
        return lhs;
    }

    Term term_or() {
        Term lhs = term_and();
        while (true) {
            if (peek().is("xor")) unsupported("xor", peek().pos);
            if (!peek().is("or")) break;
            auto p = next().pos;
            lhs = Term::connective(LogicOp::Or, std::move(lhs), term_and(), p);
        }
        return lhs;
    }

    Term term_and() {
        Term lhs = term_not();
        while (peek().is("and")) {
            auto p = next().pos;
            lhs = Term::connective(LogicOp::And, std::move(lhs), term_not(), p);
        }
        return lhs;
    }

    Term term_not() {
        if (peek().is("not")) {
            auto p = next().pos;
            return Term::negation(term_not(), p);
        }
        return term_cmp();
    }

    static std::optional<CompareOp> comparison_op(const Token& t) {
        if (t.kind != TokenKind::Symbol) return std::nullopt;
        if (t.text == "=") return CompareOp::Eq;
        if (t.text == "!=") return CompareOp::Ne;
        if (t.text == "<") return CompareOp::Lt;
        if (t.text == "<=") return CompareOp::Le;
        if (t.text == ">") return CompareOp::Gt;
        if (t.text == ">=") return CompareOp::Ge;
        return std::nullopt;
    }

    Term term_cmp() {
        Term lhs = term_add();
        if (auto op = comparison_op(peek())) {
            auto p = next().pos;
            Term rhs = term_add();
            if (comparison_op(peek()))
                fail("syntax-error", "comparisons do not chain; add parentheses", peek().pos);
            return Term::comparison(*op, std::move(lhs), std::move(rhs), p);
        }
        return lhs;
    }

    Term term_add() {
        Term lhs = term_mod();
        while (peek().is("+") || peek().is("-")) {
            const Token& t = next();
            ArithOp op = t.text == "+" ? ArithOp::Add : ArithOp::Sub;
            lhs = Term::arithmetic(op, std::move(lhs), term_mod(), t.pos);
        }
        return lhs;
    }

    Term term_mod() {
        Term lhs = term_primary();
        while (true) {
            if (peek().is("*") || peek().is("div") || peek().is("/"))
                unsupported("operator '" + peek().text + "'", peek().pos);
            if (!peek().is("mod")) break;
            auto p = next().pos;
            lhs = Term::arithmetic(ArithOp::Mod, std::move(lhs), term_primary(), p);
        }
        return lhs;
    }

    Term term_primary() {
        const Token& t = peek();
        if (t.kind == TokenKind::Integer) {
            auto p = t.pos;
            return Term::integer(integer_literal(), p);
        }
        if (t.is("true") || t.is("false")) {
            auto p = t.pos;
            bool v = next().text == "true";
            return Term::boolean(v, p);
        }
        if (t.is("(")) {
            next();
            Term inner = term();
            expect(")");
            return inner;
        }
        if (t.is("-")) unsupported("unary minus (write 0 - n)", t.pos);
        if (t.kind == TokenKind::Identifier) {
            if (t.text.front() == '$') {
                auto p = t.pos;
                return Term::variable(next().text, p);
            }
            if (t.is("if")) unsupported("conditional term", t.pos);
            if (kUnsupportedRuleKeywords.count(t.text)) unsupported(t.text, t.pos);
            if (kReserved.count(t.text)) fail_here("expected a term");
            auto p = t.pos;
            std::string name = next().text;
            if (peek().is("(")) {
                next();
                Term arg = term();
                if (peek().is(","))
                    unsupported("n-ary function application '" + name + "'", peek().pos);
                expect(")");
                return Term::apply(std::move(name), std::move(arg), p);
            }
            return Term::apply(std::move(name), p);
        }
        fail_here("expected a term");
    }

    // --- formulas ---------------------------------------------------------
    void set_logic(Logic logic, bool lenient) {
        logic_ = logic;
        lenient_ = lenient;
    }

    Formula formula() { return f_iff(); }

    bool at_connective(std::string_view word, std::string_view symbol) const {
        return peek().is(word) || (lenient_ && peek().kind == TokenKind::Symbol && peek().text == symbol);
    }

    Formula f_iff() {
        Formula lhs = f_implies();
        while (at_connective("iff", "<->")) {
            auto p = next().pos;
            lhs = Formula::binary(FormulaKind::Iff, std::move(lhs), f_implies(), p);
        }
        return lhs;
    }

    Formula f_implies() {
        Formula lhs = f_or();
        if (at_connective("implies", "->")) {
            auto p = next().pos;
            return Formula::binary(FormulaKind::Implies, std::move(lhs), f_implies(), p);
        }
        return lhs;
    }

    Formula f_or() {
        Formula lhs = f_and();
        while (at_connective("or", "|")) {
            auto p = next().pos;
            lhs = Formula::binary(FormulaKind::Or, std::move(lhs), f_and(), p);
        }
        return lhs;
    }

    Formula f_and() {
        Formula lhs = f_until();
        while (at_connective("and", "&")) {
            auto p = next().pos;
            lhs = Formula::binary(FormulaKind::And, std::move(lhs), f_until(), p);
        }
        return lhs;
    }

    Formula f_until() {
        Formula lhs = f_unary();
        if (lenient_ && until_enabled_ && peek().is("U")) {
            auto p = next().pos;
            return Formula::until(TemporalOp::U, std::move(lhs), f_until(), p);
        }
        return lhs;
    }

    struct UntilGuard {
        Parser& parser;
        bool saved;
        UntilGuard(Parser& p, bool enabled) : parser(p), saved(p.until_enabled_) {
            p.until_enabled_ = enabled;
        }
        ~UntilGuard() { parser.until_enabled_ = saved; }
    };

    static std::optional<TemporalOp> unary_upper(std::string_view s) {
        static constexpr std::array<std::pair<std::string_view, TemporalOp>, 9> table{{
            {"AG", TemporalOp::AG}, {"AF", TemporalOp::AF}, {"AX", TemporalOp::AX},
            {"EG", TemporalOp::EG}, {"EF", TemporalOp::EF}, {"EX", TemporalOp::EX},
            {"G", TemporalOp::G}, {"F", TemporalOp::F}, {"X", TemporalOp::X},
        }};
        for (auto& [k, v] : table)
            if (k == s) return v;
        return std::nullopt;
    }

    static std::optional<TemporalOp> call_style(std::string_view s) {
        static constexpr std::array<std::pair<std::string_view, TemporalOp>, 12> table{{
            {"ag", TemporalOp::AG}, {"af", TemporalOp::AF}, {"ax", TemporalOp::AX},
            {"eg", TemporalOp::EG}, {"ef", TemporalOp::EF}, {"ex", TemporalOp::EX},
            {"au", TemporalOp::AU}, {"eu", TemporalOp::EU}, {"g", TemporalOp::G},
            {"f", TemporalOp::F},   {"x", TemporalOp::X},   {"u", TemporalOp::U},
        }};
        for (auto& [k, v] : table)
            if (k == s) return v;
        return std::nullopt;
    }

    static bool continues_term(const Token& t) {
        return comparison_op(t) || t.is("+") || t.is("-") || t.is("mod");
    }

    Formula f_unary() {
        const Token& t = peek();
        if (t.is("not") || (lenient_ && t.kind == TokenKind::Symbol && t.text == "!")) {
            auto p = next().pos;
            return Formula::negation(f_unary(), p);
        }
        if (t.kind == TokenKind::Identifier) {
            const bool paren_follows = peek(1).is("(");
            if (auto op = call_style(t.text); op && paren_follows) {
                auto p = next().pos;
                next();  // (
                UntilGuard guard(*this, true);
                Formula lhs = formula();
                if (is_binary_operator(*op)) {
                    expect(",");
                    Formula rhs = formula();
                    expect(")");
                    return Formula::until(*op, std::move(lhs), std::move(rhs), p);
                }
                expect(")");
                return Formula::unary(*op, std::move(lhs), p);
            }
            if (auto op = unary_upper(t.text)) {
                if (!lenient_)
                    fail("syntax-error",
                         "uppercase operator '" + t.text + "' needs lenient mode; write " +
                             lowercase(t.text) + "(...)",
                         t.pos);
                auto p = next().pos;
                return Formula::unary(*op, f_unary(), p);
            }
            if ((t.is("A") || t.is("E")) && (peek(1).is("[") || peek(1).is("("))) {
                if (!lenient_)
                    fail("syntax-error", "path quantifier '" + t.text + "' needs lenient mode",
                         t.pos);
                auto p = t.pos;
                TemporalOp op = next().text == "A" ? TemporalOp::AU : TemporalOp::EU;
                const std::string close = next().text == "[" ? "]" : ")";
                Formula lhs = [&] {
                    UntilGuard guard(*this, false);
                    return formula();
                }();
                expect("U");
                Formula rhs = [&] {
                    UntilGuard guard(*this, false);
                    return formula();
                }();
                expect(close);
                return Formula::until(op, std::move(lhs), std::move(rhs), p);
            }
        }
        if (t.is("(")) {
            const auto m = mark();
            std::optional<SyntaxFailure> formula_error;
            try {
                next();
                UntilGuard guard(*this, true);
                Formula inner = formula();
                expect(")");
                if (!continues_term(peek())) return inner;
            } catch (const SyntaxFailure& e) {
                formula_error = e;
            }
            reset(m);
            try {
                return Formula::make_atom(term_cmp());
            } catch (const SyntaxFailure&) {
                if (formula_error) throw *formula_error;
                throw;
            }
        }
        return Formula::make_atom(term_cmp());
    }

    static std::string lowercase(std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    void check_logic(const Formula& f) const {
        if (f.kind == FormulaKind::Temporal && is_ctl_operator(f.temporal) != (logic_ == Logic::CTL)) {
            fail("mixed-logic",
                 std::string("mixed-logic: ") + (logic_ == Logic::CTL ? "LTL" : "CTL") +
                     " operator " + operator_name(f.temporal) + " in a " +
                     (logic_ == Logic::CTL ? "CTL" : "LTL") + " formula",
                 f.pos);
        }
        for (const auto& sub : f.operands) check_logic(sub);
    }

    Formula property(Logic logic, bool lenient) {
        set_logic(logic, lenient);
        Formula f = formula();
        check_logic(f);
        return f;
    }

    // --- rules ------------------------------------------------------------
    Rule rule() {
        const Token& t = peek();
        auto p = t.pos;
        if (t.is("par")) {
            next();
            std::vector<Rule> body;
            while (!peek().is("endpar")) {
                if (at_end()) fail_here("expected 'endpar'");
                body.push_back(rule());
            }
            next();
            if (body.empty()) fail("syntax-error", "empty par block", p);
            return Rule::parallel(std::move(body), p);
        }
        if (t.is("if")) {
            next();
            Term guard = term();
            expect("then");
            Rule then_rule = rule();
            std::optional<Rule> else_rule;
            if (accept("else")) else_rule = rule();
            expect("endif");
            return Rule::conditional(std::move(guard), std::move(then_rule), std::move(else_rule), p);
        }
        if (t.kind == TokenKind::Identifier && kUnsupportedRuleKeywords.count(t.text))
            unsupported(t.text, t.pos);
        if (t.kind == TokenKind::Identifier && !kReserved.count(t.text) && t.text.front() != '$') {
            if (peek(1).is("[")) {
                std::string name = next().text;
                next();
                if (!peek().is("]")) unsupported("parameterized macro call '" + name + "'", peek().pos);
                next();
                return Rule::call(std::move(name), p);
            }
            Term location = term_primary();
            if (location.kind != TermKind::Apply) fail("syntax-error", "expected a location", p);
            expect(":=");
            Term value = term();
            return Rule::update(std::move(location), std::move(value), p);
        }
        fail_here("expected a rule");
    }

    // --- specification ----------------------------------------------------
    AsmSpecification specification() {
        AsmSpecification spec;
        if (!peek().is("asm")) {
            if (peek().is("module")) unsupported("module", peek().pos);
            fail_here("expected 'asm'");
        }
        next();
        spec.name = identifier("specification name");

        while (peek().is("import") || peek().is("export")) {
            const Token& kw = next();
            std::string rest = rest_of_line(kw);
            if (kw.is("import")) {
                if (rest.empty()) fail("syntax-error", "expected a module after 'import'", kw.pos);
                spec.imports.push_back(rest);
            }
        }

        expect("signature");
        expect(":");

        struct PendingDomain {
            SourcePos pos;
            bool defined = false;
        };
        std::vector<std::string> pending_order;
        std::map<std::string, PendingDomain, std::less<>> pending;
        std::vector<DomainDecl> enums;

        while (!peek().is("definitions")) {
            const Token& t = peek();
            if (at_end()) fail_here("expected 'definitions'");
            if (t.is("abstract") || t.is("concrete")) unsupported(t.text + " domain", t.pos);
            if (t.is("enum")) {
                next();
                expect("domain");
                DomainDecl d;
                d.pos = peek().pos;
                d.name = identifier("domain name");
                d.kind = DomainKind::Enumeration;
                expect("=");
                expect("{");
                d.values.push_back(identifier("enumeration value"));
                while (accept("|") || accept(",")) d.values.push_back(identifier("enumeration value"));
                expect("}");
                std::set<std::string> seen;
                for (const auto& v : d.values)
                    if (!seen.insert(v).second)
                        fail("duplicate-declaration", "duplicate enumeration value '" + v + "'", d.pos);
                spec.domains.push_back(d);
                continue;
            }
            if (t.is("domain")) {
                next();
                auto p = peek().pos;
                std::string name = identifier("domain name");
                expect("subsetof");
                std::string base = identifier("base domain");
                if (base != "Integer" && base != "Natural")
                    unsupported("domain subset of '" + base + "'", p);
                DomainDecl d;
                d.name = name;
                d.kind = DomainKind::IntegerRange;
                d.pos = p;
                d.lo = 1;
                d.hi = 0;  // filled in by the definition
                spec.domains.push_back(d);
                pending_order.push_back(name);
                pending[name] = {p, false};
                continue;
            }
            if (t.is("monitored") || t.is("controlled") || t.is("static") || t.is("derived")) {
                FunctionDecl f;
                const std::string kind = next().text;
                f.kind = kind == "monitored"    ? FunctionKind::Monitored
                         : kind == "controlled" ? FunctionKind::Controlled
                         : kind == "static"     ? FunctionKind::Static
                                                : FunctionKind::Derived;
                f.pos = peek().pos;
                f.name = identifier("function name");
                expect(":");
                std::string first = type_name();
                if (accept("->")) {
                    f.arg_domain = first;
                    f.result_domain = type_name();
                } else {
                    f.result_domain = first;
                }
                spec.functions.push_back(f);
                continue;
            }
            if (t.is("shared") || t.is("out") || t.is("local"))
                unsupported(t.text + " function", t.pos);
            fail_here("expected a domain or function declaration");
        }
        next();
        expect(":");

        std::set<std::string> defined_functions;
        bool have_main = false;
        while (!at_end() && !peek().is("default") && !peek().is("init")) {
            const Token& t = peek();
            if (t.is("domain")) {
                next();
                auto p = peek().pos;
                std::string name = identifier("domain name");
                expect("=");
                expect("{");
                if (peek().kind != TokenKind::Integer) unsupported("non-range domain definition", peek().pos);
                std::int64_t lo = integer_literal();
                if (peek().is(",")) unsupported("domain given as a value set", peek().pos);
                if (!accept(":")) {
                    if (peek().is(".")) unsupported("range syntax '..'", peek().pos);
                    fail_here("expected ':'");
                }
                std::int64_t hi = integer_literal();
                expect("}");
                auto it = pending.find(name);
                if (it == pending.end())
                    fail("undeclared-domain", "definition of undeclared domain '" + name + "'", p);
                if (it->second.defined)
                    fail("duplicate-declaration", "domain '" + name + "' is defined twice", p);
                if (lo > hi)
                    fail("invalid-range", "empty range {" + std::to_string(lo) + " : " +
                                              std::to_string(hi) + "} for domain '" + name + "'",
                         p);
                it->second.defined = true;
                for (auto& d : spec.domains)
                    if (d.name == name) {
                        d.lo = lo;
                        d.hi = hi;
                    }
                continue;
            }
            if (t.is("function")) {
                FunctionDefinition def = function_definition();
                if (!defined_functions.insert(def.function).second)
                    fail("duplicate-declaration", "function '" + def.function + "' is defined twice",
                         def.pos);
                spec.definitions.push_back(std::move(def));
                continue;
            }
            if (t.is("turbo")) unsupported("turbo rule", t.pos);
            if (t.is("rule")) unsupported("non-macro rule declaration", t.pos);
            if (t.is("invariant")) unsupported("invariant", t.pos);
            if (t.is("macro")) {
                next();
                expect("rule");
                RuleDecl r;
                r.pos = peek().pos;
                r.name = identifier("rule name");
                if (peek().is("(")) unsupported("parameterized macro rule '" + r.name + "'", peek().pos);
                expect("=");
                r.body = rule();
                if (spec.find_macro(r.name) || (have_main && spec.main_rule.name == r.name))
                    fail("duplicate-declaration", "rule '" + r.name + "' is declared twice", r.pos);
                spec.macro_rules.push_back(std::move(r));
                continue;
            }
            if (t.is("main")) {
                auto p = next().pos;
                expect("rule");
                if (have_main) fail("duplicate-declaration", "more than one main rule", p);
                spec.main_rule.pos = peek().pos;
                spec.main_rule.name = identifier("rule name");
                expect("=");
                spec.main_rule.body = rule();
                if (spec.find_macro(spec.main_rule.name))
                    fail("duplicate-declaration",
                         "main rule name '" + spec.main_rule.name + "' clashes with a macro rule", p);
                have_main = true;
                continue;
            }
            if (t.is("CTLSPEC") || t.is("LTLSPEC")) {
                PropertyDecl prop;
                prop.pos = t.pos;
                prop.logic = next().is("CTLSPEC") ? Logic::CTL : Logic::LTL;
                std::size_t start = peek().offset;
                prop.formula = property(prop.logic, true);
                prop.source_text = std::string(source_.substr(start, last_end() - start));
                spec.properties.push_back(std::move(prop));
                continue;
            }
            fail_here("expected a definition, rule or property");
        }
        if (!have_main) fail("syntax-error", "missing main rule", peek().pos);
        for (const auto& name : pending_order) {
            const auto& pd = pending[name];
            if (!pd.defined)
                unsupported("unbounded domain '" + name + "' (no finite definition)", pd.pos);
        }

        if (accept("default")) {
            if (!peek().is("init")) fail_here("expected 'init'");
        }
        if (accept("init")) {
            spec.init_name = identifier("initial state name");
            expect(":");
            std::set<std::string> seen;
            while (peek().is("function")) {
                FunctionDefinition def = function_definition();
                if (!seen.insert(def.function).second)
                    fail("duplicate-declaration",
                         "function '" + def.function + "' is initialized twice", def.pos);
                spec.init.push_back(std::move(def));
            }
        }
        if (!at_end()) fail_here("expected end of specification");
        return spec;
    }

    std::string type_name() {
        const Token& t = peek();
        if (t.is("Prod")) unsupported("n-ary function (Prod domain)", t.pos);
        if (t.is("Powerset") || t.is("Seq") || t.is("Bag") || t.is("Map"))
            unsupported("structured domain '" + t.text + "'", t.pos);
        return identifier("domain name");
    }

    FunctionDefinition function_definition() {
        expect("function");
        FunctionDefinition def;
        def.pos = peek().pos;
        def.function = identifier("function name");
        if (accept("(")) {
            const Token& v = peek();
            if (v.kind != TokenKind::Identifier || v.text.front() != '$') fail_here("expected a $variable");
            def.parameter = next().text;
            expect("in");
            def.parameter_domain = identifier("domain name");
            if (peek().is(",")) unsupported("n-ary function definition", peek().pos);
            expect(")");
        }
        expect("=");
        def.value = term();
        return def;
    }

    /// Raw text after `kw` up to the end of its line, trimmed, without a
    /// trailing ';'. Tokens on that line are skipped.
    std::string rest_of_line(const Token& kw) {
        std::size_t stop = source_.find('\n', kw.end);
        if (stop == std::string_view::npos) stop = source_.size();
        std::string text(source_.substr(kw.end, stop - kw.end));
        auto comment = text.find("//");
        if (comment != std::string::npos) text.erase(comment);
        auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
        while (!text.empty() && is_space(text.back())) text.pop_back();
        if (!text.empty() && text.back() == ';') text.pop_back();
        while (!text.empty() && is_space(text.back())) text.pop_back();
        std::size_t i = 0;
        while (i < text.size() && is_space(text[i])) ++i;
        text.erase(0, i);
        while (peek().kind != TokenKind::End && peek().offset < stop) next();
        return text;
    }

    // --- avalla -------------------------------------------------------------
    AvallaScenario scenario() {
        AvallaScenario sc;
        if (!peek().is("scenario")) fail_here("expected 'scenario'");
        next();
        sc.name = identifier("scenario name");
        const Token& load = peek();
        if (!load.is("load")) fail_here("expected 'load'");
        next();
        // The path runs to the end of the line.
        std::string path = rest_of_line(load);
        if (path.empty()) fail("syntax-error", "expected a file after 'load'", load.pos);
        sc.load = path;

        while (!at_end()) {
            const Token& t = peek();
            auto p = t.pos;
            if (t.kind == TokenKind::Symbol && t.text.rfind(kLoopMarkerPrefix, 0) == 0) {
                std::string rest = t.text.substr(kLoopMarkerPrefix.size());
                std::size_t step = 0;
                auto digits = rest.find_first_of("0123456789");
                if (rest.find("step") == std::string::npos || digits == std::string::npos)
                    fail("syntax-error", "malformed loop marker", p);
                std::from_chars(rest.data() + digits, rest.data() + rest.size(), step);
                next();
                sc.commands.push_back(AvallaCommand::loop_marker(step));
                continue;
            }
            if (t.is("set")) {
                next();
                Term location = term_primary();
                if (location.kind != TermKind::Apply) fail("syntax-error", "expected a location", p);
                expect(":=");
                Term value = term();
                expect(";");
                sc.commands.push_back(AvallaCommand::set(std::move(location), std::move(value), p));
                continue;
            }
            if (t.is("step")) {
                next();
                if (peek().is("until")) unsupported("step until", peek().pos);
                expect(";");
                sc.commands.push_back(AvallaCommand::step(p));
                continue;
            }
            if (t.is("check")) {
                next();
                Term cond = term();
                expect(";");
                sc.commands.push_back(AvallaCommand::check(std::move(cond), p));
                continue;
            }
            if (t.is("exec") || t.is("execblock") || t.is("begin") || t.is("pick"))
                unsupported("avalla command '" + t.text + "'", p);
            fail("unknown-command", "unknown command " + describe(t), p);
        }
        return sc;
    }

private:
    std::vector<Token> tokens_;
    std::string_view source_;
    std::size_t pos_ = 0;
    Logic logic_ = Logic::CTL;
    bool lenient_ = true;
    bool until_enabled_ = true;
};

template <class T, class F>
Result<T> run(std::string_view text, std::string_view keep_prefix, F&& body) {
    auto tokens = detail::tokenize(text, keep_prefix);
    if (!tokens) return tokens.diagnostics();
    Parser parser(std::move(tokens).value(), text);
    try {
        return body(parser);
    } catch (const SyntaxFailure& failure) {
        Diagnostics d;
        const auto& diag = failure.diagnostic;
        d.error(diag.code, diag.message, diag.location.value_or(SourcePos{}));
        return d;
    }
}

}  // namespace

Result<AsmSpecification> parse_asm(std::string_view text) {
    return run<AsmSpecification>(text, {}, [](Parser& p) { return p.specification(); });
}

Result<Formula> parse_property(std::string_view text, Logic logic, bool lenient) {
    return run<Formula>(text, {}, [&](Parser& p) {
        Formula f = p.property(logic, lenient);
        if (!p.at_end()) p.fail_here("unexpected input after formula");
        return f;
    });
}

Result<AvallaScenario> parse_avalla(std::string_view text) {
    return run<AvallaScenario>(text, kLoopMarkerPrefix, [](Parser& p) { return p.scenario(); });
}

Result<Term> parse_term(std::string_view text) {
    return run<Term>(text, {}, [](Parser& p) {
        Term t = p.term();
        if (!p.at_end()) p.fail_here("unexpected input after term");
        return t;
    });
}

}  // namespace asmprop
