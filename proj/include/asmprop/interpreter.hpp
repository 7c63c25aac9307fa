#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asmprop/ast.hpp"
#include "asmprop/signature.hpp"

namespace asmprop {

/// One assignable location: a controlled or monitored function, plus the
/// argument value for unary functions.
struct Location {
    std::string function;
    std::optional<Value> argument;
    const DomainDecl* domain = nullptr;  // result domain
    bool monitored = false;
    std::string label;  // "sec", "lamp(RED)"
};

/// Fixed slot order of a state vector: controlled locations in declaration
/// order, then monitored locations sorted by function name. Unary functions
/// contribute one slot per argument value, in domain order.
class StateLayout {
public:
    explicit StateLayout(const Signature& signature);

    std::size_t size() const { return slots_.size(); }
    std::size_t controlled_count() const { return controlled_; }
    const Location& slot(std::size_t i) const { return slots_[i]; }
    const std::vector<Location>& slots() const { return slots_; }
    std::optional<std::size_t> find(std::string_view function,
                                    const std::optional<Value>& argument = std::nullopt) const;

private:
    std::vector<Location> slots_;
    std::size_t controlled_ = 0;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_function_;
};

/// Values of every location in layout order. Monitored values are those the
/// environment chose for the step leaving this state.
struct State {
    std::vector<Value> values;

    friend bool operator==(const State&, const State&) = default;
    friend auto operator<=>(const State&, const State&) = default;
};

class UpdateSet {
public:
    /// Throws InconsistentUpdate when the slot already holds a different value.
    void add(std::size_t slot, Value value, const std::string& label);

    bool empty() const { return updates_.empty(); }
    std::size_t size() const { return updates_.size(); }
    const std::map<std::size_t, Value>& updates() const { return updates_; }
    std::optional<Value> get(std::size_t slot) const;

private:
    std::map<std::size_t, Value> updates_;
};

struct FailedCheck {
    std::size_t command_index = 0;
    Term expected;
    State actual;
    std::string actual_text;  // "sec=1, min=0, h=0, signal=false"
};

struct ScenarioResult {
    bool passed = true;
    std::size_t steps_executed = 0;
    std::optional<FailedCheck> failed_check;
    std::vector<State> trace;  // state before each step, then the final state
};

/// Executable form of a type-correct specification.
class Machine {
public:
    /// Throws DiagnosticsError when the specification does not type-check.
    static std::shared_ptr<const Machine> create(AsmSpecification spec);

    const AsmSpecification& spec() const { return spec_; }
    const Signature& signature() const { return signature_; }
    const StateLayout& layout() const { return layout_; }

    /// One state per monitored valuation, all sharing the init controlled part.
    std::vector<State> initial_states() const;
    /// Init controlled values, monitored functions at their first domain element.
    State default_initial_state() const;

    /// Every monitored valuation, first monitored location most significant.
    const std::vector<std::vector<Value>>& monitored_valuations() const { return valuations_; }

    UpdateSet compute_update_set(const State& state) const;
    /// Applies the update set to the controlled part; monitored values are kept.
    State apply(const State& state, const UpdateSet& updates) const;
    State with_monitored(const State& state, const std::vector<Value>& monitored) const;
    std::vector<Value> monitored_part(const State& state) const;
    std::vector<State> successors(const State& state) const;

    Value evaluate(const Term& term, const State& state) const;
    bool holds(const Term& term, const State& state) const;

    ScenarioResult run_scenario(const AvallaScenario& scenario) const;

    std::string format_value(std::size_t slot, const Value& value) const;
    std::string format_state(const State& state, bool include_monitored = true) const;
    /// Conjunction `loc = value and ...` over the given slot range.
    Term valuation_term(const State& state, std::size_t first, std::size_t last) const;

private:
    Machine(AsmSpecification spec, Signature signature);

    using Bindings = std::vector<std::pair<std::string, Value>>;

    Value eval(const Term& term, const State& state, Bindings& bindings, int depth) const;
    void collect(const Rule& rule, const State& state, UpdateSet& out, int depth) const;
    void check_domain(const DomainDecl& domain, const Value& value, const std::string& what) const;

    AsmSpecification spec_;
    Signature signature_;
    StateLayout layout_;
    std::vector<std::vector<Value>> valuations_;
};

// Convenience wrappers that build a Machine for a single call.
std::vector<State> initial_states(const AsmSpecification& spec);
UpdateSet compute_update_set(const AsmSpecification& spec, const State& state);
std::vector<State> successors(const AsmSpecification& spec, const State& state);
ScenarioResult run_scenario(const AsmSpecification& spec, const AvallaScenario& scenario);

}  // namespace asmprop
