#include "asmprop/bridge.hpp"

#include <algorithm>

#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

void validate(const Trace& trace, const Machine& m) {
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        if (trace.states[i].values.size() != m.layout().size())
            throw Error(ErrorKind::TraceMismatch, "trace state " + std::to_string(i) + " does not match the specification's locations");
    }
    for (std::size_t i = 0; i + 1 < trace.states.size(); ++i) {
        auto next = m.successors(trace.states[i]);
        if (std::find(next.begin(), next.end(), trace.states[i + 1]) == next.end())
            throw Error(ErrorKind::TraceMismatch, "trace step " + std::to_string(i + 1) + " is not a transition of the specification");
    }
    if (trace.loop_start && *trace.loop_start >= trace.states.size())
        throw Error(ErrorKind::TraceMismatch, "loop start lies beyond the trace");
}

void emit_sets(AvallaScenario& out, const Machine& m, const State& state, const State* previous) {
    const auto& layout = m.layout();
    for (std::size_t i = layout.controlled_count(); i < layout.size(); ++i) {
        if (previous && previous->values[i] == state.values[i]) continue;
        Term location = m.valuation_term(state, i, i + 1).operands[0];
        out.commands.push_back(AvallaCommand::set(std::move(location),
                                                  m.signature().value_term(state.values[i], *layout.slot(i).domain)));
    }
}

}  // namespace

AvallaScenario trace_to_avalla(const Trace& trace, const Machine& machine, const std::string& scenario_name,
                               const std::string& load_path) {
    validate(trace, machine);
    AvallaScenario out;
    out.name = scenario_name;
    out.load = load_path.empty() ? machine.spec().name + ".asm" : load_path;
    if (trace.states.empty()) return out;

    const std::size_t controlled = machine.layout().controlled_count();
    const auto& states = trace.states;
    if (states.size() == 1) {
        State defaults = machine.default_initial_state();
        emit_sets(out, machine, states[0], &defaults);
        out.commands.push_back(AvallaCommand::check(machine.valuation_term(states[0], 0, controlled)));
    }
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        emit_sets(out, machine, states[i], i == 0 ? nullptr : &states[i - 1]);
        out.commands.push_back(AvallaCommand::step());
        out.commands.push_back(AvallaCommand::check(machine.valuation_term(states[i + 1], 0, controlled)));
    }
    if (states.size() > 1) emit_sets(out, machine, states.back(), &states[states.size() - 2]);
    if (trace.loop_start) out.commands.push_back(AvallaCommand::loop_marker(*trace.loop_start));
    return out;
}

AvallaScenario witness_to_avalla(const Trace& trace, const Machine& machine, const std::string& scenario_name,
                                 const std::string& load_path) {
    return trace_to_avalla(trace, machine, scenario_name, load_path);
}

Result<AsmSpecification> enrich_spec(const AsmSpecification& spec, const std::vector<PropertyDecl>& properties) {
    auto sig = extract_signature(spec);
    if (!sig) return sig.diagnostics();
    Diagnostics diags;
    for (const auto& p : properties) {
        auto typed = typecheck_formula(p.formula, p.logic, *sig);
        if (!typed) diags.append(typed.diagnostics());
    }
    if (diags.has_errors()) return diags;

    AsmSpecification out = spec;
    for (auto p : properties) {
        if (std::find(out.properties.begin(), out.properties.end(), p) != out.properties.end()) continue;
        if (p.source_text.empty()) p.source_text = print_formula(p.formula, FormulaStyle::CallStyle);
        out.properties.push_back(std::move(p));
    }
    return out;
}

}  // namespace asmprop
