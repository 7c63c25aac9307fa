#include "asmprop/signature.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "asmprop/syntax.hpp"

namespace asmprop {

std::string Type::describe() const {
    switch (kind) {
        case Kind::Boolean: return "Boolean";
        case Kind::Integer: return "integer";
        case Kind::Enumeration: return "enumeration " + domain;
    }
    return "?";
}

const DomainDecl* Signature::domain(std::string_view name) const {
    auto it = domain_index_.find(name);
    return it == domain_index_.end() ? nullptr : &domains_[it->second];
}

const FunctionDecl* Signature::function(std::string_view name) const {
    auto it = function_index_.find(name);
    return it == function_index_.end() ? nullptr : &functions_[it->second];
}

std::optional<Signature::EnumConstant> Signature::enum_constant(std::string_view name) const {
    auto it = enum_index_.find(name);
    if (it == enum_index_.end()) return std::nullopt;
    return EnumConstant{&domains_[it->second.first], it->second.second};
}

const FunctionDefinition* Signature::definition(std::string_view fn) const {
    for (const auto& d : definitions_)
        if (d.function == fn) return &d;
    return nullptr;
}

std::vector<std::string> Signature::function_names() const {
    std::vector<std::string> names;
    names.reserve(functions_.size());
    for (const auto& f : functions_) names.push_back(f.name);
    return names;
}

Type Signature::type_of_domain(const DomainDecl& d) const {
    switch (d.kind) {
        case DomainKind::Boolean: return Type::boolean();
        case DomainKind::IntegerRange: return Type::integer(d.name);
        case DomainKind::Enumeration: return {Type::Kind::Enumeration, d.name};
    }
    return Type::boolean();
}

std::string Signature::format_value(const Value& value, const DomainDecl& d) const {
    switch (value.kind) {
        case ValueKind::Boolean: return value.as_bool() ? "true" : "false";
        case ValueKind::Integer: return std::to_string(value.raw);
        case ValueKind::Enumeration:
            if (value.raw >= 0 && value.raw < static_cast<std::int64_t>(d.values.size()))
                return d.values[static_cast<std::size_t>(value.raw)];
            return "<invalid>";
    }
    return "?";
}

Term Signature::value_term(const Value& value, const DomainDecl& d) const {
    switch (value.kind) {
        case ValueKind::Boolean: return Term::boolean(value.as_bool());
        case ValueKind::Integer:
            if (value.raw < 0)
                return Term::arithmetic(ArithOp::Sub, Term::integer(0), Term::integer(-value.raw));
            return Term::integer(value.raw);
        case ValueKind::Enumeration: return Term::apply(format_value(value, d));
    }
    return Term::boolean(false);
}

std::string Signature::summary() const {
    std::ostringstream out;
    out << "Domains:\n";
    for (const auto& d : domains_) {
        out << "- " << d.name << ": ";
        switch (d.kind) {
            case DomainKind::Boolean: out << "{false, true}"; break;
            case DomainKind::IntegerRange: out << "integers {" << d.lo << " : " << d.hi << "}"; break;
            case DomainKind::Enumeration: {
                out << "enumeration {";
                for (std::size_t i = 0; i < d.values.size(); ++i) out << (i ? " | " : "") << d.values[i];
                out << "}";
                break;
            }
        }
        out << '\n';
    }
    out << "Functions:\n";
    for (const auto& f : functions_) {
        out << "- " << f.name << ": " << to_string(f.kind) << ", ";
        if (f.arg_domain) out << *f.arg_domain << " -> ";
        out << f.result_domain;
        switch (f.kind) {
            case FunctionKind::Monitored: out << " (set by the environment before each step)"; break;
            case FunctionKind::Controlled: out << " (updated by the rules)"; break;
            case FunctionKind::Static: out << " (constant)"; break;
            case FunctionKind::Derived: out << " (computed from other functions)"; break;
        }
        out << '\n';
    }
    return out.str();
}

namespace {

const std::set<std::string, std::less<>> kUnboundedDomains = {"Integer", "Natural", "Real",
                                                               "String", "Complex", "Char"};

}  // namespace

Result<Signature> extract_signature(const AsmSpecification& spec) {
    Signature sig;
    Diagnostics diags;
    std::map<std::string, std::string, std::less<>> taken;  // name -> what

    auto claim = [&](const std::string& name, const std::string& what, SourcePos pos) {
        auto [it, inserted] = taken.emplace(name, what);
        if (!inserted) {
            diags.error("duplicate-symbol",
                        "duplicate symbol '" + name + "' (" + what + " clashes with " + it->second + ")",
                        pos);
            return false;
        }
        return true;
    };

    sig.domains_.push_back(DomainDecl::boolean());
    sig.domain_index_["Boolean"] = 0;
    taken.emplace("Boolean", "builtin domain");

    for (const auto& d : spec.domains) {
        if (!claim(d.name, "domain", d.pos)) continue;
        if (d.kind == DomainKind::IntegerRange && d.lo > d.hi) {
            diags.error("invalid-range", "domain '" + d.name + "' has an empty range", d.pos);
            continue;
        }
        if (d.kind == DomainKind::Enumeration && d.values.empty()) {
            diags.error("invalid-range", "enumeration '" + d.name + "' has no values", d.pos);
            continue;
        }
        sig.domain_index_[d.name] = sig.domains_.size();
        sig.domains_.push_back(d);
    }
    for (std::size_t di = 0; di < sig.domains_.size(); ++di) {
        const auto& d = sig.domains_[di];
        if (d.kind != DomainKind::Enumeration) continue;
        for (std::size_t vi = 0; vi < d.values.size(); ++vi) {
            if (claim(d.values[vi], "enumeration value of " + d.name, d.pos))
                sig.enum_index_[d.values[vi]] = {di, static_cast<std::int64_t>(vi)};
        }
    }

    auto check_domain_ref = [&](const std::string& name, const FunctionDecl& f) {
        if (sig.domain_index_.count(name)) return true;
        if (kUnboundedDomains.count(name)) {
            diags.error("unsupported-construct",
                        "unsupported construct: unbounded domain '" + name + "' for function '" +
                            f.name + "'",
                        f.pos);
        } else {
            diags.error("undeclared-domain",
                        "undeclared domain '" + name + "' in the declaration of '" + f.name + "'", f.pos);
        }
        return false;
    };

    for (const auto& f : spec.functions) {
        if (!claim(f.name, "function", f.pos)) continue;
        bool ok = check_domain_ref(f.result_domain, f);
        if (f.arg_domain) ok = check_domain_ref(*f.arg_domain, f) && ok;
        if (!ok) continue;
        sig.function_index_[f.name] = sig.functions_.size();
        sig.functions_.push_back(f);
    }
    sig.definitions_ = spec.definitions;

    if (diags.has_errors()) return diags;
    return sig;
}

std::optional<std::string> nearest_name(std::string_view name,
                                        const std::vector<std::string>& candidates) {
    auto distance = [](std::string_view a, std::string_view b) {
        std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
        for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            cur[0] = i;
            for (std::size_t j = 1; j <= b.size(); ++j) {
                std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
                cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
            }
            std::swap(prev, cur);
        }
        return prev[b.size()];
    };
    std::optional<std::string> best;
    std::size_t best_distance = 3;
    for (const auto& c : candidates) {
        auto d = distance(name, c);
        if (d < best_distance) {
            best = c;
            best_distance = d;
        }
    }
    if (best) return best;
    std::size_t best_prefix = 0;
    for (const auto& c : candidates) {
        if (c.size() < 2 || name.size() < 2) continue;
        const bool prefix = name.substr(0, c.size()) == c || std::string_view(c).substr(0, name.size()) == name;
        if (prefix && std::min(c.size(), name.size()) > best_prefix) {
            best = c;
            best_prefix = std::min(c.size(), name.size());
        }
    }
    return best;
}

namespace {

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

struct TermChecker {
    const Signature& sig;
    const std::map<std::string, std::string>& variables;
    Diagnostics& out;
    std::set<std::string>* reported_unknown = nullptr;
    std::vector<std::string>* symbols = nullptr;

    void unknown(const Term& t) {
        if (reported_unknown && !reported_unknown->insert(t.name).second) return;
        std::string message = "unknown symbol '" + t.name + "'";
        std::vector<std::string> names = sig.function_names();
        std::vector<std::string> candidates = names;
        for (const auto& d : sig.domains())
            for (const auto& v : d.values) candidates.push_back(v);
        if (auto near = nearest_name(t.name, candidates)) message += " (did you mean '" + *near + "'?)";
        out.error("unknown-symbol", message, t.pos, "declared functions: " + join(names));
    }

    std::optional<Type> operator()(const Term& t) {
        switch (t.kind) {
            case TermKind::Literal:
                return t.literal.kind == ValueKind::Boolean ? Type::boolean() : Type::integer();
            case TermKind::Variable: {
                auto it = variables.find(t.name);
                if (it == variables.end()) {
                    out.error("unknown-symbol", "unbound variable '" + t.name + "'", t.pos);
                    return std::nullopt;
                }
                const DomainDecl* d = sig.domain(it->second);
                if (!d) return std::nullopt;
                return sig.type_of_domain(*d);
            }
            case TermKind::Apply:
                return apply(t);
            case TermKind::Arithmetic: {
                auto lhs = (*this)(t.operands[0]);
                auto rhs = (*this)(t.operands[1]);
                if (!lhs || !rhs) return std::nullopt;
                if (lhs->kind != Type::Kind::Integer || rhs->kind != Type::Kind::Integer) {
                    out.error("type-mismatch",
                              "type mismatch: arithmetic on " + lhs->describe() + " and " +
                                  rhs->describe() + " in '" + print_term(t) + "'",
                              t.pos);
                    return std::nullopt;
                }
                return Type::integer();
            }
            case TermKind::Comparison: {
                auto lhs = (*this)(t.operands[0]);
                auto rhs = (*this)(t.operands[1]);
                if (!lhs || !rhs) return std::nullopt;
                const bool ordering = t.compare != CompareOp::Eq && t.compare != CompareOp::Ne;
                if (!lhs->compatible_with(*rhs)) {
                    out.error("type-mismatch",
                              "type mismatch: " + lhs->describe() + " vs. " + rhs->describe() +
                                  " in '" + print_term(t) + "'",
                              t.pos);
                    return std::nullopt;
                }
                if (ordering && lhs->kind != Type::Kind::Integer) {
                    out.error("type-mismatch",
                              "type mismatch: ordering comparison on " + lhs->describe() + " in '" +
                                  print_term(t) + "'",
                              t.pos);
                    return std::nullopt;
                }
                return Type::boolean();
            }
            case TermKind::Logical: {
                bool ok = true;
                for (const auto& operand : t.operands) {
                    auto ty = (*this)(operand);
                    if (!ty) {
                        ok = false;
                        continue;
                    }
                    if (ty->kind != Type::Kind::Boolean) {
                        out.error("type-mismatch",
                                  "type mismatch: operand '" + print_term(operand) + "' of '" +
                                      print_term(t) + "' is " + ty->describe() + ", not Boolean",
                                  operand.pos);
                        ok = false;
                    }
                }
                if (!ok) return std::nullopt;
                return Type::boolean();
            }
        }
        return std::nullopt;
    }

    std::optional<Type> apply(const Term& t) {
        if (const FunctionDecl* f = sig.function(t.name)) {
            if (symbols && std::find(symbols->begin(), symbols->end(), f->name) == symbols->end())
                symbols->push_back(f->name);
            const int given = t.has_argument() ? 1 : 0;
            if (given != f->arity()) {
                out.error("arity-mismatch",
                          "function '" + f->name + "' expects " + std::to_string(f->arity()) +
                              " argument(s), got " + std::to_string(given),
                          t.pos);
                return std::nullopt;
            }
            if (given) {
                auto arg = (*this)(t.operands[0]);
                if (!arg) return std::nullopt;
                const DomainDecl* ad = sig.domain(*f->arg_domain);
                Type expected = sig.type_of_domain(*ad);
                if (!arg->compatible_with(expected)) {
                    out.error("type-mismatch",
                              "type mismatch: argument of '" + f->name + "' is " + arg->describe() +
                                  ", expected " + expected.describe(),
                              t.operands[0].pos);
                    return std::nullopt;
                }
            }
            return sig.type_of_domain(*sig.domain(f->result_domain));
        }
        if (auto ec = sig.enum_constant(t.name)) {
            if (t.has_argument()) {
                out.error("arity-mismatch", "enumeration value '" + t.name + "' takes no argument", t.pos);
                return std::nullopt;
            }
            return sig.type_of_domain(*ec->domain);
        }
        unknown(t);
        return std::nullopt;
    }
};

void check_formula(const Formula& f, TermChecker& checker, Diagnostics& out) {
    if (f.kind == FormulaKind::Atom) {
        auto ty = checker(f.atom);
        if (ty && ty->kind != Type::Kind::Boolean) {
            out.error("non-boolean-atom",
                      "atom '" + print_term(f.atom) + "' is " + ty->describe() + ", not Boolean",
                      f.atom.pos);
        }
        return;
    }
    for (const auto& sub : f.operands) check_formula(sub, checker, out);
}

void check_logic(const Formula& f, Logic logic, Diagnostics& out) {
    if (f.kind == FormulaKind::Temporal && is_ctl_operator(f.temporal) != (logic == Logic::CTL)) {
        out.error("mixed-logic",
                  std::string("mixed-logic: operator ") + operator_name(f.temporal) + " in a " +
                      to_string(logic) + " formula",
                  f.pos);
    }
    for (const auto& sub : f.operands) check_logic(sub, logic, out);
}

}  // namespace

std::optional<Type> typecheck_term(const Term& term, const Signature& signature,
                                   const std::map<std::string, std::string>& variables,
                                   Diagnostics& out) {
    TermChecker checker{signature, variables, out};
    return checker(term);
}

Result<TypedFormula> typecheck_formula(const Formula& formula, Logic logic, const Signature& signature) {
    Diagnostics diags;
    check_logic(formula, logic, diags);
    std::map<std::string, std::string> no_variables;
    std::set<std::string> reported;
    TypedFormula typed{formula, logic, {}};
    TermChecker checker{signature, no_variables, diags, &reported, &typed.symbols};
    check_formula(formula, checker, diags);
    if (diags.has_errors()) return diags;
    return typed;
}

namespace {

/// Folds literal-only integer/Boolean/enum terms; nullopt when the term
/// depends on state, variables or static functions.
std::optional<Value> fold_constant(const Term& t, const Signature& sig) {
    switch (t.kind) {
        case TermKind::Literal:
            return t.literal;
        case TermKind::Apply:
            if (!t.has_argument() && !sig.function(t.name))
                if (auto ec = sig.enum_constant(t.name)) return Value::enumeration(ec->index);
            return std::nullopt;
        case TermKind::Arithmetic: {
            auto a = fold_constant(t.operands[0], sig);
            auto b = fold_constant(t.operands[1], sig);
            if (!a || !b) return std::nullopt;
            switch (t.arith) {
                case ArithOp::Add: return Value::integer(a->raw + b->raw);
                case ArithOp::Sub: return Value::integer(a->raw - b->raw);
                case ArithOp::Mod:
                    if (b->raw == 0) return std::nullopt;
                    {
                        auto m = b->raw < 0 ? -b->raw : b->raw;
                        auto r = a->raw % m;
                        return Value::integer(r < 0 ? r + m : r);
                    }
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

bool references_state(const Term& t, const Signature& sig) {
    if (t.kind == TermKind::Apply) {
        if (const FunctionDecl* f = sig.function(t.name); f && f->kind != FunctionKind::Static) return true;
    }
    return std::any_of(t.operands.begin(), t.operands.end(),
                       [&](const Term& s) { return references_state(s, sig); });
}

void collect_applied(const Term& t, std::vector<const Term*>& out) {
    if (t.kind == TermKind::Apply) out.push_back(&t);
    for (const auto& s : t.operands) collect_applied(s, out);
}

}  // namespace

Diagnostics typecheck_spec(const AsmSpecification& spec) {
    auto sig_result = extract_signature(spec);
    if (!sig_result) return sig_result.diagnostics();
    const Signature& sig = *sig_result;
    Diagnostics diags;
    const std::map<std::string, std::string> no_vars;

    auto expect_type = [&](const Term& value, const std::string& domain_name,
                           const std::map<std::string, std::string>& vars, const std::string& what) {
        auto ty = typecheck_term(value, sig, vars, diags);
        const DomainDecl* d = sig.domain(domain_name);
        if (!ty || !d) return;
        Type expected = sig.type_of_domain(*d);
        if (!ty->compatible_with(expected)) {
            diags.error("type-mismatch",
                        "type mismatch: " + what + " is " + ty->describe() + ", expected " +
                            expected.describe(),
                        value.pos);
        }
    };

    auto bind_parameter = [&](const FunctionDefinition& def, const FunctionDecl& f,
                              std::map<std::string, std::string>& vars) {
        if (def.parameter.has_value() != (f.arity() == 1)) {
            diags.error("arity-mismatch",
                        "definition of '" + f.name + "' must bind exactly " +
                            std::to_string(f.arity()) + " parameter(s)",
                        def.pos);
            return false;
        }
        if (def.parameter) {
            if (*def.parameter_domain != *f.arg_domain) {
                diags.error("type-mismatch",
                            "parameter of '" + f.name + "' ranges over " + *def.parameter_domain +
                                ", expected " + *f.arg_domain,
                            def.pos);
                return false;
            }
            vars[*def.parameter] = *def.parameter_domain;
        }
        return true;
    };

    // Static and derived definitions.
    for (const auto& def : spec.definitions) {
        const FunctionDecl* f = sig.function(def.function);
        if (!f) {
            diags.error("unknown-symbol", "definition of undeclared function '" + def.function + "'", def.pos);
            continue;
        }
        if (f->kind != FunctionKind::Static && f->kind != FunctionKind::Derived) {
            diags.error("invalid-definition",
                        std::string("only static and derived functions can be defined; '") + f->name +
                            "' is " + to_string(f->kind),
                        def.pos);
            continue;
        }
        std::map<std::string, std::string> vars;
        if (!bind_parameter(def, *f, vars)) continue;
        expect_type(def.value, f->result_domain, vars, "definition of '" + f->name + "'");
        if (f->kind == FunctionKind::Static && references_state(def.value, sig)) {
            diags.error("invalid-definition",
                        "static function '" + f->name + "' must not depend on the state", def.pos);
        }
    }
    for (const auto& f : sig.functions()) {
        if ((f.kind == FunctionKind::Static || f.kind == FunctionKind::Derived) && !sig.definition(f.name))
            diags.error("missing-definition", std::string(to_string(f.kind)) + " function '" + f.name +
                                                  "' has no definition", f.pos);
    }
    // Definitions must not be cyclic.
    {
        std::map<std::string, int> colour;
        std::function<void(const std::string&)> visit = [&](const std::string& name) {
            colour[name] = 1;
            const FunctionDefinition* def = sig.definition(name);
            std::vector<const Term*> applied;
            if (def) collect_applied(def->value, applied);
            for (const Term* t : applied) {
                if (!sig.definition(t->name)) continue;
                if (colour[t->name] == 1) {
                    diags.error("recursive-definition",
                                "definition of '" + name + "' depends on itself through '" + t->name + "'",
                                def->pos);
                } else if (colour[t->name] == 0) {
                    visit(t->name);
                }
            }
            colour[name] = 2;
        };
        for (const auto& def : spec.definitions)
            if (colour[def.function] == 0) visit(def.function);
    }

    // Rules.
    std::function<void(const Rule&)> check_rule = [&](const Rule& r) {
        switch (r.kind) {
            case RuleKind::Update: {
                const FunctionDecl* f = sig.function(r.location.name);
                if (!f) {
                    typecheck_term(r.location, sig, no_vars, diags);
                    typecheck_term(r.value, sig, no_vars, diags);
                    return;
                }
                if (f->kind == FunctionKind::Monitored) {
                    diags.error("update-to-monitored",
                                "cannot update monitored function '" + f->name + "'", r.pos);
                } else if (f->kind != FunctionKind::Controlled) {
                    diags.error("update-to-non-controlled",
                                std::string("cannot update ") + to_string(f->kind) + " function '" +
                                    f->name + "'",
                                r.pos);
                }
                if (!typecheck_term(r.location, sig, no_vars, diags)) {
                    typecheck_term(r.value, sig, no_vars, diags);
                    return;
                }
                expect_type(r.value, f->result_domain, no_vars,
                            "value assigned to '" + print_term(r.location) + "'");
                return;
            }
            case RuleKind::Parallel:
                for (const auto& child : r.body) check_rule(child);
                return;
            case RuleKind::Conditional: {
                auto ty = typecheck_term(r.guard, sig, no_vars, diags);
                if (ty && ty->kind != Type::Kind::Boolean)
                    diags.error("type-mismatch",
                                "guard '" + print_term(r.guard) + "' is " + ty->describe() + ", not Boolean",
                                r.guard.pos);
                for (const auto& child : r.body) check_rule(child);
                return;
            }
            case RuleKind::MacroCall:
                if (!spec.find_macro(r.macro)) {
                    std::vector<std::string> names;
                    for (const auto& m : spec.macro_rules) names.push_back(m.name);
                    std::string message = "call to undeclared macro rule '" + r.macro + "'";
                    if (auto near = nearest_name(r.macro, names)) message += " (did you mean '" + *near + "'?)";
                    diags.error("unknown-macro", message, r.pos);
                }
                return;
        }
    };
    for (const auto& m : spec.macro_rules) check_rule(m.body);
    check_rule(spec.main_rule.body);

    // Macro call cycles.
    {
        std::map<std::string, int> colour;
        std::function<void(const std::string&, const Rule&)> walk;
        std::function<void(const std::string&)> visit = [&](const std::string& name) {
            colour[name] = 1;
            if (const RuleDecl* decl = spec.find_macro(name)) walk(name, decl->body);
            colour[name] = 2;
        };
        walk = [&](const std::string& owner, const Rule& r) {
            if (r.kind == RuleKind::MacroCall && spec.find_macro(r.macro)) {
                if (colour[r.macro] == 1)
                    diags.error("recursive-macro",
                                "macro rule '" + owner + "' calls '" + r.macro + "' recursively", r.pos);
                else if (colour[r.macro] == 0)
                    visit(r.macro);
            }
            for (const auto& child : r.body) walk(owner, child);
        };
        for (const auto& m : spec.macro_rules)
            if (colour[m.name] == 0) visit(m.name);
    }

    // Initial state.
    for (const auto& entry : spec.init) {
        const FunctionDecl* f = sig.function(entry.function);
        if (!f) {
            std::string message = "init of undeclared function '" + entry.function + "'";
            if (auto near = nearest_name(entry.function, sig.function_names()))
                message += " (did you mean '" + *near + "'?)";
            diags.error("unknown-symbol", message, entry.pos);
            continue;
        }
        if (f->kind != FunctionKind::Controlled) {
            diags.error("init-not-controlled",
                        std::string("init entry for ") + to_string(f->kind) + " function '" + f->name +
                            "'; only controlled functions are initialized",
                        entry.pos);
            continue;
        }
        std::map<std::string, std::string> vars;
        if (!bind_parameter(entry, *f, vars)) continue;
        expect_type(entry.value, f->result_domain, vars, "initial value of '" + f->name + "'");
        if (auto v = fold_constant(entry.value, sig)) {
            const DomainDecl* d = sig.domain(f->result_domain);
            if (d && (v->kind == ValueKind::Integer) == (d->kind == DomainKind::IntegerRange) &&
                !d->contains(*v)) {
                diags.error("value-out-of-domain",
                            "initial value " + sig.format_value(*v, *d) + " of '" + f->name +
                                "' is outside domain " + d->name + " [" + std::to_string(d->lo) + ", " +
                                std::to_string(d->hi) + "]",
                            entry.value.pos);
            }
        }
    }

    // Embedded properties.
    for (const auto& prop : spec.properties) {
        auto typed = typecheck_formula(prop.formula, prop.logic, sig);
        if (!typed) diags.append(typed.diagnostics());
    }
    return diags;
}

}  // namespace asmprop
