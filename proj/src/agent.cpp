#include "asmprop/agent.hpp"

#include <cctype>
#include <regex>
#include <sstream>

#include "asmprop/bridge.hpp"
#include "asmprop/checker.hpp"
#include "asmprop/interpreter.hpp"
#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t at = 0;
    while (at <= text.size()) {
        auto nl = text.find('\n', at);
        if (nl == std::string_view::npos) nl = text.size();
        std::string line(text.substr(at, nl - at));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
        at = nl + 1;
    }
    return out;
}

std::string strip_property_decoration(std::string s) {
    s = trim(s);
    while (!s.empty() && s.front() == '`') s.erase(s.begin());
    while (!s.empty() && s.back() == '`') s.pop_back();
    s = trim(s);
    for (const char* kw : {"CTLSPEC", "LTLSPEC"}) {
        const std::string k = kw;
        if (s.rfind(k, 0) == 0 && (s.size() == k.size() || std::isspace(static_cast<unsigned char>(s[k.size()])))) {
            s = trim(s.substr(k.size()));
            break;
        }
    }
    while (!s.empty() && s.back() == ';') s.pop_back();
    return trim(s);
}

bool parses_in_some_logic(const std::string& text) {
    return parse_property(text, Logic::CTL, true).ok() || parse_property(text, Logic::LTL, true).ok();
}

bool mentions_word(const std::string& text, const std::string& word) {
    for (auto pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos + 1)) {
        auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
        bool left = pos == 0 || !ident(text[pos - 1]);
        bool right = pos + word.size() >= text.size() || !ident(text[pos + word.size()]);
        if (left && right) return true;
    }
    return false;
}

std::string summarize_failure(const Verdict& v, const Machine& machine) {
    std::ostringstream out;
    out << "E1 property fails on the specification";
    if (v.evidence) {
        const auto& t = *v.evidence;
        out << "; counterexample of " << t.steps() << " step(s)";
        if (t.is_lasso()) out << " looping back to step " << *t.loop_start;
        out << "; initial state: " << machine.format_state(t.states.front());
        out << "; final state: " << machine.format_state(t.states.back());
    }
    return out.str();
}

}  // namespace

std::optional<std::string> extract_formula(std::string_view completion) {
    if (auto open = completion.find("```"); open != std::string_view::npos) {
        auto body_start = completion.find('\n', open);
        auto close = body_start == std::string_view::npos ? std::string_view::npos : completion.find("```", body_start);
        if (close != std::string_view::npos) {
            std::string joined;
            for (const auto& line : lines_of(completion.substr(body_start + 1, close - body_start - 1))) {
                auto t = trim(line);
                if (t.empty()) continue;
                if (!joined.empty()) joined += ' ';
                joined += t;
            }
            auto s = strip_property_decoration(joined);
            if (!s.empty()) return s;
        }
    }
    std::optional<std::string> first_nonempty;
    for (const auto& line : lines_of(completion)) {
        auto s = strip_property_decoration(line);
        if (s.empty() || s.rfind("```", 0) == 0) continue;
        if (!first_nonempty) first_nonempty = s;
        if (parses_in_some_logic(s)) return s;
    }
    return first_nonempty;
}

std::vector<std::string> parse_list(std::string_view completion) {
    static const std::regex marker(R"(^\s*(?:[-*+•]|\\item|\d+[.)])\s+(.*)$)");
    std::vector<std::string> items;
    for (const auto& line : lines_of(completion)) {
        std::smatch m;
        if (std::regex_match(line, m, marker)) {
            items.push_back(trim(m[1].str()));
        } else if (!items.empty() && !trim(line).empty() &&
                   std::isspace(static_cast<unsigned char>(line.front()))) {
            items.back() += ' ' + trim(line);
        }
    }
    for (auto& item : items) {
        while (!item.empty() && (item.back() == ';' || item.back() == '.')) item.pop_back();
        item = trim(item);
    }
    std::erase_if(items, [](const std::string& s) { return s.empty(); });
    return items;
}

std::string describe_scenario_outcome(const AsmSpecification& spec, const AvallaScenario& scenario) {
    std::size_t checks = 0;
    for (const auto& c : scenario.commands)
        if (c.kind == CommandKind::Check) ++checks;
    ScenarioResult r;
    try {
        r = Machine::create(spec)->run_scenario(scenario);
    } catch (const DiagnosticsError& e) {
        return "the scenario cannot run:\n" + render_diagnostics(e.diagnostics(), Audience::Agent);
    } catch (const Error& e) {
        return std::string("the scenario cannot run: ") + e.what();
    }
    std::ostringstream out;
    if (r.steps_executed == 0) out << "no steps executed; ";
    if (r.passed) {
        out << "passed: " << r.steps_executed << " step(s) executed, all " << checks << " check(s) hold";
        if (!r.trace.empty()) out << "\nfinal state: " << Machine::create(spec)->format_state(r.trace.back());
        return out.str();
    }
    const auto& f = *r.failed_check;
    out << "failed: the check at command index " << f.command_index << " does not hold after "
        << r.steps_executed << " step(s)\n"
        << "expected: " << print_term(f.expected) << "\n"
        << "actual: " << f.actual_text;
    return out.str();
}

Agent::Agent(CompletionBackend& backend, AgentConfig config, PromptLibrary prompts)
    : backend_(backend), config_(std::move(config)), prompts_(std::move(prompts)) {
    if (config_.max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max iterations must be at least 1");
    if (!(config_.temperature >= 0.0)) throw Error(ErrorKind::InvalidArgument, "temperature must be non-negative");
}

std::string Agent::ask(AgentTranscript& transcript, const std::string& prompt, int iteration) {
    transcript.add(Role::User, prompt, iteration);
    std::string completion;
    try {
        completion = backend_.complete(prompt);
    } catch (const Error& e) {
        transcript.note("backend-error", e.what(), iteration);
        throw AgentError(e.kind(), e.what(), transcript);
    }
    transcript.add(Role::Agent, completion, iteration);
    return completion;
}

namespace {

Signature checked_signature(const AsmSpecification& spec) {
    auto sig = extract_signature(spec);
    if (!sig) throw DiagnosticsError(sig.diagnostics());
    auto diags = typecheck_spec(spec);
    if (diags.has_errors()) throw DiagnosticsError(diags);
    return std::move(sig).value();
}

}  // namespace

ElicitResult Agent::elicit_properties(const AsmSpecification& spec, int count, std::string_view spec_text) {
    if (count < 1) throw Error(ErrorKind::Precondition, "property count must be at least 1");
    const Signature sig = checked_signature(spec);
    AgentTranscript transcript("elicit");
    const std::string prompt = prompts_.render(
        PromptTask::Elicit, {{"spec_text", spec_text.empty() ? print_asm(spec) : std::string(spec_text)},
                             {"signature_summary", sig.summary()},
                             {"count", std::to_string(count)}});

    std::string current = prompt;
    for (int iteration = 1; iteration <= 2; ++iteration) {
        auto items = parse_list(ask(transcript, current, iteration));
        if (static_cast<int>(items.size()) == count) {
            transcript.set_artifact(items);
            return {std::move(items), std::move(transcript)};
        }
        const std::string feedback = "E1 expected a list of " + std::to_string(count) + " item(s), found " +
                                     std::to_string(items.size());
        transcript.add(Role::Checker, feedback, iteration);
        current = prompt + "\n\nYour previous answer was rejected: " + feedback.substr(3) +
                  ". Answer with exactly " + std::to_string(count) + " bulleted items.";
    }
    throw AgentError(ErrorKind::UnparseableResponse,
                     "completion is not a list of " + std::to_string(count) + " properties", std::move(transcript));
}

FormalizeResult Agent::formalize(const AsmSpecification& spec, std::string_view requirement, Logic logic,
                                 std::string_view spec_text) {
    if (trim(requirement).empty()) throw Error(ErrorKind::Precondition, "requirement text is empty");
    const Signature sig = checked_signature(spec);
    AgentTranscript transcript("formalize");

    EarsRequirement ears = classify_ears(requirement);
    {
        std::string text = to_string(ears.pattern);
        if (!ears.trigger.empty()) text += "; trigger: " + ears.trigger;
        if (!ears.precondition.empty()) text += "; precondition: " + ears.precondition;
        if (!ears.response.empty()) text += "; response: " + ears.response;
        transcript.note("ears", text);
        if (!ears.recognized) transcript.note("warning", "requirement does not follow an EARS pattern");
    }

    const std::map<std::string, std::string> base = {
        {"spec_text", spec_text.empty() ? print_asm(spec) : std::string(spec_text)},
        {"signature_summary", sig.summary()},
        {"requirement", trim(requirement)},
        {"logic", to_string(logic)},
    };
    std::string prompt = prompts_.render(PromptTask::Formalize, base);

    int budget = config_.max_iterations;
    bool semantic_done = !config_.semantic_repair;
    std::optional<TypedFormula> fallback;
    std::optional<std::string> fallback_text;

    auto accept = [&](TypedFormula typed, const std::string& source) -> FormalizeResult {
        PropertyDecl decl;
        decl.logic = logic;
        decl.formula = typed.formula;
        decl.source_text = source;
        decl.origin = PropertyOrigin::AgentGenerated;
        auto enriched = enrich_spec(spec, {decl});
        if (!enriched) throw DiagnosticsError(enriched.diagnostics());
        transcript.set_artifact(decl);
        return {std::move(typed), std::move(enriched).value(), std::move(ears), std::move(transcript)};
    };

    for (int iteration = 1; iteration <= budget; ++iteration) {
        const std::string completion = ask(transcript, prompt, iteration);
        const auto candidate = extract_formula(completion);

        Diagnostics diags;
        std::optional<TypedFormula> typed;
        if (!candidate) {
            diags.error("no-formula", "the answer contains no formula");
        } else if (auto parsed = parse_property(*candidate, logic, true); !parsed) {
            diags = parsed.diagnostics();
        } else if (auto checked = typecheck_formula(parsed.value(), logic, sig); !checked) {
            diags = checked.diagnostics();
        } else {
            typed = std::move(checked).value();
        }

        std::string feedback;
        if (typed) {
            if (semantic_done) return accept(std::move(*typed), *candidate);
            semantic_done = true;
            auto ks = build_kripke(Machine::create(spec));
            Verdict v = check_property(ks, *typed);
            transcript.note("verdict", v.describe(), iteration);
            if (v.holds) return accept(std::move(*typed), *candidate);
            feedback = summarize_failure(v, ks.machine());
            fallback = std::move(typed);
            fallback_text = candidate;
            ++budget;
        } else {
            feedback = trim(render_diagnostics(diags, Audience::Agent));
        }
        transcript.add(Role::Checker, feedback, iteration);
        auto bindings = base;
        bindings["formula_text"] = candidate.value_or(trim(completion));
        bindings["diagnostics"] = feedback;
        prompt = prompts_.render(PromptTask::Repair, bindings);
    }
    if (fallback) {
        transcript.note("warning", "semantic repair did not produce a holding property; keeping the last valid one");
        return accept(std::move(*fallback), *fallback_text);
    }
    throw AgentError(ErrorKind::RepairBudgetExhausted,
                     "no valid formula after " + std::to_string(budget) + " attempt(s)", std::move(transcript));
}

ExplainResult Agent::explain_formula(const AsmSpecification& spec, const Formula& formula, Logic logic) {
    const Signature sig = checked_signature(spec);
    auto typed = typecheck_formula(formula, logic, sig);
    if (!typed)
        throw Error(ErrorKind::Precondition,
                    "formula does not type-check:\n" + render_diagnostics(typed.diagnostics(), Audience::Agent));
    AgentTranscript transcript("explain-formula");
    const std::string prompt = prompts_.render(PromptTask::ExplainFormula,
                                               {{"signature_summary", sig.summary()},
                                                {"logic", to_string(logic)},
                                                {"formula_text", print_formula(formula, FormulaStyle::Uppercase)}});
    std::string text = ask(transcript, prompt, 1);
    std::vector<std::string> missing;
    for (const auto& name : typed->symbols)
        if (!mentions_word(text, name)) missing.push_back(name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        transcript.note("coverage-warning", "explanation does not mention: " + list, 1);
    }
    transcript.set_artifact(text);
    return {std::move(text), std::move(transcript)};
}

ExplainResult Agent::explain_scenario(const AsmSpecification& spec, const AvallaScenario& scenario,
                                      std::string_view scenario_text) {
    const Signature sig = checked_signature(spec);
    AgentTranscript transcript("explain-scenario");
    const std::string prompt = prompts_.render(
        PromptTask::ExplainScenario,
        {{"signature_summary", sig.summary()},
         {"scenario_text", scenario_text.empty() ? print_avalla(scenario) : std::string(scenario_text)},
         {"diagnostics", describe_scenario_outcome(spec, scenario)}});
    std::string text = ask(transcript, prompt, 1);
    transcript.set_artifact(text);
    return {std::move(text), std::move(transcript)};
}

}  // namespace asmprop
