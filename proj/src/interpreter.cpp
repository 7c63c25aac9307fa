#include "asmprop/interpreter.hpp"

#include <algorithm>

#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

constexpr int kMaxDepth = 256;

std::string location_label(const Signature& sig, const FunctionDecl& f, const std::optional<Value>& arg) {
    if (!arg) return f.name;
    return f.name + "(" + sig.format_value(*arg, *sig.domain(*f.arg_domain)) + ")";
}

}  // namespace

StateLayout::StateLayout(const Signature& sig) {
    auto add = [&](const FunctionDecl& f, bool monitored) {
        const DomainDecl* result = sig.domain(f.result_domain);
        if (!f.arg_domain) {
            by_function_[f.name].push_back(slots_.size());
            slots_.push_back({f.name, std::nullopt, result, monitored, f.name});
            return;
        }
        for (const auto& arg : sig.domain(*f.arg_domain)->elements()) {
            by_function_[f.name].push_back(slots_.size());
            slots_.push_back({f.name, arg, result, monitored, location_label(sig, f, arg)});
        }
    };
    for (const auto& f : sig.functions())
        if (f.kind == FunctionKind::Controlled) add(f, false);
    controlled_ = slots_.size();
    std::vector<const FunctionDecl*> monitored;
    for (const auto& f : sig.functions())
        if (f.kind == FunctionKind::Monitored) monitored.push_back(&f);
    std::sort(monitored.begin(), monitored.end(),
              [](const FunctionDecl* a, const FunctionDecl* b) { return a->name < b->name; });
    for (const auto* f : monitored) add(*f, true);
}

std::optional<std::size_t> StateLayout::find(std::string_view function,
                                             const std::optional<Value>& argument) const {
    auto it = by_function_.find(function);
    if (it == by_function_.end()) return std::nullopt;
    for (std::size_t i : it->second)
        if (slots_[i].argument == argument) return i;
    return std::nullopt;
}

void UpdateSet::add(std::size_t slot, Value value, const std::string& label) {
    auto [it, inserted] = updates_.emplace(slot, value);
    if (!inserted && it->second != value) {
        throw Error(ErrorKind::InconsistentUpdate,
                    "inconsistent update: location '" + label + "' updated to two different values");
    }
}

std::optional<Value> UpdateSet::get(std::size_t slot) const {
    auto it = updates_.find(slot);
    if (it == updates_.end()) return std::nullopt;
    return it->second;
}

Machine::Machine(AsmSpecification spec, Signature signature)
    : spec_(std::move(spec)), signature_(std::move(signature)), layout_(signature_) {
    std::vector<std::vector<Value>> domains;
    for (std::size_t i = layout_.controlled_count(); i < layout_.size(); ++i)
        domains.push_back(layout_.slot(i).domain->elements());
    std::vector<std::size_t> digits(domains.size(), 0);
    while (true) {
        std::vector<Value> v;
        v.reserve(domains.size());
        for (std::size_t i = 0; i < domains.size(); ++i) v.push_back(domains[i][digits[i]]);
        valuations_.push_back(std::move(v));
        std::size_t pos = domains.size();
        while (pos > 0) {
            --pos;
            if (++digits[pos] < domains[pos].size()) break;
            digits[pos] = 0;
            if (pos == 0) return;
        }
        if (domains.empty()) return;
    }
}

std::shared_ptr<const Machine> Machine::create(AsmSpecification spec) {
    Diagnostics diags = typecheck_spec(spec);
    if (diags.has_errors()) throw DiagnosticsError(diags);
    auto sig = extract_signature(spec);
    return std::shared_ptr<const Machine>(new Machine(std::move(spec), std::move(sig).value()));
}

void Machine::check_domain(const DomainDecl& domain, const Value& value, const std::string& what) const {
    if (!domain.contains(value)) {
        std::string shown = value.kind == ValueKind::Enumeration ? std::to_string(value.raw)
                                                                  : signature_.format_value(value, domain);
        throw Error(ErrorKind::DomainViolation,
                    "domain violation: " + what + " gets " + shown + ", outside domain " + domain.name);
    }
}

State Machine::default_initial_state() const {
    State s;
    s.values.resize(layout_.size());
    for (std::size_t i = 0; i < layout_.controlled_count(); ++i) {
        const Location& loc = layout_.slot(i);
        const FunctionDefinition* init = nullptr;
        for (const auto& entry : spec_.init)
            if (entry.function == loc.function) init = &entry;
        if (!init)
            throw Error(ErrorKind::MissingInit,
                        "missing init: controlled function '" + loc.function + "' has no initial value");
        Bindings bindings;
        if (init->parameter) bindings.emplace_back(*init->parameter, *loc.argument);
        State empty;
        empty.values.resize(layout_.size());
        Value v = eval(init->value, empty, bindings, 0);
        check_domain(*loc.domain, v, "initial value of '" + loc.label + "'");
        s.values[i] = v;
    }
    for (std::size_t i = layout_.controlled_count(); i < layout_.size(); ++i)
        s.values[i] = layout_.slot(i).domain->elements().front();
    return s;
}

std::vector<State> Machine::initial_states() const {
    State base = default_initial_state();
    std::vector<State> out;
    out.reserve(valuations_.size());
    for (const auto& v : valuations_) out.push_back(with_monitored(base, v));
    return out;
}

State Machine::with_monitored(const State& state, const std::vector<Value>& monitored) const {
    State s = state;
    std::copy(monitored.begin(), monitored.end(),
              s.values.begin() + static_cast<std::ptrdiff_t>(layout_.controlled_count()));
    return s;
}

std::vector<Value> Machine::monitored_part(const State& state) const {
    return {state.values.begin() + static_cast<std::ptrdiff_t>(layout_.controlled_count()),
            state.values.end()};
}

Value Machine::eval(const Term& t, const State& state, Bindings& bindings, int depth) const {
    if (depth > kMaxDepth) throw Error(ErrorKind::Precondition, "evaluation nested too deeply");
    switch (t.kind) {
        case TermKind::Literal:
            return t.literal;
        case TermKind::Variable:
            for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
                if (it->first == t.name) return it->second;
            throw Error(ErrorKind::Precondition, "unbound variable '" + t.name + "'");
        case TermKind::Apply: {
            const FunctionDecl* f = signature_.function(t.name);
            if (!f) {
                if (auto ec = signature_.enum_constant(t.name)) return Value::enumeration(ec->index);
                throw Error(ErrorKind::UnknownLocation, "unknown symbol '" + t.name + "'");
            }
            std::optional<Value> arg;
            if (t.has_argument()) {
                arg = eval(t.operands[0], state, bindings, depth + 1);
                check_domain(*signature_.domain(*f->arg_domain), *arg, "argument of '" + f->name + "'");
            }
            if (f->kind == FunctionKind::Static || f->kind == FunctionKind::Derived) {
                const FunctionDefinition* def = signature_.definition(f->name);
                if (!def) throw Error(ErrorKind::Precondition, "function '" + f->name + "' has no definition");
                Bindings inner;
                if (def->parameter) inner.emplace_back(*def->parameter, *arg);
                Value v = eval(def->value, state, inner, depth + 1);
                check_domain(*signature_.domain(f->result_domain), v, "value of '" + f->name + "'");
                return v;
            }
            auto slot = layout_.find(f->name, arg);
            if (!slot) throw Error(ErrorKind::UnknownLocation, "unknown location '" + t.name + "'");
            return state.values[*slot];
        }
        case TermKind::Arithmetic: {
            std::int64_t a = eval(t.operands[0], state, bindings, depth + 1).raw;
            std::int64_t b = eval(t.operands[1], state, bindings, depth + 1).raw;
            std::int64_t r = 0;
            switch (t.arith) {
                case ArithOp::Add:
                    if (__builtin_add_overflow(a, b, &r))
                        throw Error(ErrorKind::DomainViolation, "integer overflow in '" + print_term(t) + "'");
                    return Value::integer(r);
                case ArithOp::Sub:
                    if (__builtin_sub_overflow(a, b, &r))
                        throw Error(ErrorKind::DomainViolation, "integer overflow in '" + print_term(t) + "'");
                    return Value::integer(r);
                case ArithOp::Mod: {
                    if (b == 0) throw Error(ErrorKind::DivisionByZero, "mod by zero in '" + print_term(t) + "'");
                    std::int64_t m = b < 0 ? -b : b;
                    r = a % m;
                    return Value::integer(r < 0 ? r + m : r);
                }
            }
            break;
        }
        case TermKind::Comparison: {
            Value a = eval(t.operands[0], state, bindings, depth + 1);
            Value b = eval(t.operands[1], state, bindings, depth + 1);
            switch (t.compare) {
                case CompareOp::Eq: return Value::boolean(a == b);
                case CompareOp::Ne: return Value::boolean(a != b);
                case CompareOp::Lt: return Value::boolean(a.raw < b.raw);
                case CompareOp::Le: return Value::boolean(a.raw <= b.raw);
                case CompareOp::Gt: return Value::boolean(a.raw > b.raw);
                case CompareOp::Ge: return Value::boolean(a.raw >= b.raw);
            }
            break;
        }
        case TermKind::Logical: {
            bool a = eval(t.operands[0], state, bindings, depth + 1).as_bool();
            switch (t.logic) {
                case LogicOp::Not: return Value::boolean(!a);
                case LogicOp::And: return Value::boolean(a && eval(t.operands[1], state, bindings, depth + 1).as_bool());
                case LogicOp::Or: return Value::boolean(a || eval(t.operands[1], state, bindings, depth + 1).as_bool());
                case LogicOp::Implies:
                    return Value::boolean(!a || eval(t.operands[1], state, bindings, depth + 1).as_bool());
                case LogicOp::Iff: return Value::boolean(a == eval(t.operands[1], state, bindings, depth + 1).as_bool());
            }
            break;
        }
    }
    throw Error(ErrorKind::Precondition, "cannot evaluate '" + print_term(t) + "'");
}

Value Machine::evaluate(const Term& term, const State& state) const {
    Bindings bindings;
    return eval(term, state, bindings, 0);
}

bool Machine::holds(const Term& term, const State& state) const { return evaluate(term, state).as_bool(); }

void Machine::collect(const Rule& r, const State& state, UpdateSet& out, int depth) const {
    if (depth > kMaxDepth) throw Error(ErrorKind::Precondition, "rule nesting too deep");
    switch (r.kind) {
        case RuleKind::Update: {
            std::optional<Value> arg;
            if (r.location.has_argument()) arg = evaluate(r.location.operands[0], state);
            const FunctionDecl* f = signature_.function(r.location.name);
            if (arg) check_domain(*signature_.domain(*f->arg_domain), *arg, "argument of '" + f->name + "'");
            auto slot = layout_.find(r.location.name, arg);
            if (!slot) throw Error(ErrorKind::UnknownLocation, "unknown location '" + print_term(r.location) + "'");
            out.add(*slot, evaluate(r.value, state), layout_.slot(*slot).label);
            return;
        }
        case RuleKind::Parallel:
            for (const auto& child : r.body) collect(child, state, out, depth + 1);
            return;
        case RuleKind::Conditional:
            if (holds(r.guard, state)) collect(r.body[0], state, out, depth + 1);
            else if (r.has_else()) collect(r.body[1], state, out, depth + 1);
            return;
        case RuleKind::MacroCall: {
            const RuleDecl* m = spec_.find_macro(r.macro);
            if (!m) throw Error(ErrorKind::Precondition, "unknown macro rule '" + r.macro + "'");
            collect(m->body, state, out, depth + 1);
            return;
        }
    }
}

UpdateSet Machine::compute_update_set(const State& state) const {
    UpdateSet out;
    collect(spec_.main_rule.body, state, out, 0);
    return out;
}

State Machine::apply(const State& state, const UpdateSet& updates) const {
    State next = state;
    for (const auto& [slot, value] : updates.updates()) {
        const Location& loc = layout_.slot(slot);
        check_domain(*loc.domain, value, "location '" + loc.label + "'");
        next.values[slot] = value;
    }
    return next;
}

std::vector<State> Machine::successors(const State& state) const {
    State next = apply(state, compute_update_set(state));
    std::vector<State> out;
    out.reserve(valuations_.size());
    for (const auto& v : valuations_) out.push_back(with_monitored(next, v));
    return out;
}

std::string Machine::format_value(std::size_t slot, const Value& value) const {
    return signature_.format_value(value, *layout_.slot(slot).domain);
}

std::string Machine::format_state(const State& state, bool include_monitored) const {
    std::string out;
    const std::size_t n = include_monitored ? layout_.size() : layout_.controlled_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += layout_.slot(i).label + "=" + format_value(i, state.values[i]);
    }
    return out;
}

Term Machine::valuation_term(const State& state, std::size_t first, std::size_t last) const {
    std::optional<Term> out;
    for (std::size_t i = first; i < last; ++i) {
        const Location& loc = layout_.slot(i);
        Term location = Term::apply(loc.function);
        if (loc.argument) {
            const DomainDecl* ad = signature_.domain(*signature_.function(loc.function)->arg_domain);
            location = Term::apply(loc.function, signature_.value_term(*loc.argument, *ad));
        }
        Term eq = Term::comparison(CompareOp::Eq, std::move(location),
                                   signature_.value_term(state.values[i], *loc.domain));
        out = out ? Term::connective(LogicOp::And, std::move(*out), std::move(eq)) : std::move(eq);
    }
    return out ? *out : Term::boolean(true);
}

ScenarioResult Machine::run_scenario(const AvallaScenario& scenario) const {
    // Reject ill-formed commands before executing anything.
    for (const auto& c : scenario.commands) {
        if (c.kind == CommandKind::Set) {
            const FunctionDecl* f = signature_.function(c.location.name);
            if (c.location.kind != TermKind::Apply || !f)
                throw Error(ErrorKind::UnknownLocation,
                            "set-to-unknown: '" + print_term(c.location) + "' is not a declared function");
            if (f->kind != FunctionKind::Monitored)
                throw Error(ErrorKind::SetToControlled,
                            std::string("set-to-controlled: cannot set ") + to_string(f->kind) + " function '" +
                                f->name + "'; only monitored functions can be set");
            Diagnostics diags;
            typecheck_term(c.location, signature_, {}, diags);
            typecheck_term(c.value, signature_, {}, diags);
            if (diags.has_errors()) throw DiagnosticsError(diags);
        } else if (c.kind == CommandKind::Check) {
            Diagnostics diags;
            auto ty = typecheck_term(c.condition, signature_, {}, diags);
            if (ty && ty->kind != Type::Kind::Boolean)
                diags.error("non-boolean-atom", "check '" + print_term(c.condition) + "' is not Boolean",
                            c.condition.pos);
            if (diags.has_errors()) throw DiagnosticsError(diags);
        }
    }

    ScenarioResult result;
    State current = default_initial_state();
    for (std::size_t i = 0; i < scenario.commands.size(); ++i) {
        const auto& c = scenario.commands[i];
        switch (c.kind) {
            case CommandKind::Set: {
                std::optional<Value> arg;
                if (c.location.has_argument()) arg = evaluate(c.location.operands[0], current);
                auto slot = layout_.find(c.location.name, arg);
                if (!slot)
                    throw Error(ErrorKind::UnknownLocation, "unknown location '" + print_term(c.location) + "'");
                Value v = evaluate(c.value, current);
                if (!layout_.slot(*slot).domain->contains(v))
                    throw Error(ErrorKind::SetOutOfDomain,
                                "set value out of domain: '" + print_term(c.value) + "' for '" +
                                    layout_.slot(*slot).label + "'");
                current.values[*slot] = v;
                break;
            }
            case CommandKind::Step:
                result.trace.push_back(current);
                current = apply(current, compute_update_set(current));
                ++result.steps_executed;
                break;
            case CommandKind::Check:
                if (!holds(c.condition, current)) {
                    result.passed = false;
                    result.failed_check = FailedCheck{i, c.condition, current, format_state(current)};
                    result.trace.push_back(current);
                    return result;
                }
                break;
            case CommandKind::LoopMarker:
                break;
        }
    }
    result.trace.push_back(current);
    return result;
}

std::vector<State> initial_states(const AsmSpecification& spec) { return Machine::create(spec)->initial_states(); }

UpdateSet compute_update_set(const AsmSpecification& spec, const State& state) {
    return Machine::create(spec)->compute_update_set(state);
}

std::vector<State> successors(const AsmSpecification& spec, const State& state) {
    return Machine::create(spec)->successors(state);
}

ScenarioResult run_scenario(const AsmSpecification& spec, const AvallaScenario& scenario) {
    return Machine::create(spec)->run_scenario(scenario);
}

}  // namespace asmprop
