#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asmprop/ast.hpp"
#include "asmprop/backend.hpp"
#include "asmprop/diagnostics.hpp"
#include "asmprop/ears.hpp"
#include "asmprop/prompts.hpp"
#include "asmprop/signature.hpp"
#include "asmprop/transcript.hpp"

namespace asmprop {

/// An agent task failed; the transcript holds every attempt up to the failure.
class AgentError : public Error {
public:
    AgentError(ErrorKind kind, const std::string& message, AgentTranscript transcript)
        : Error(kind, message), transcript_(std::move(transcript)) {}

    const AgentTranscript& transcript() const { return transcript_; }

private:
    AgentTranscript transcript_;
};

struct ElicitResult {
    std::vector<std::string> properties;
    AgentTranscript transcript;
};

struct FormalizeResult {
    TypedFormula formula;
    AsmSpecification enriched;
    EarsRequirement requirement;
    AgentTranscript transcript;
};

struct ExplainResult {
    std::string text;
    AgentTranscript transcript;
};

/// Candidate formula text in a completion: the first fenced block, else the
/// first line that parses as a property of either logic, else the first
/// non-empty line. CTLSPEC/LTLSPEC prefixes and a trailing ';' are dropped.
std::optional<std::string> extract_formula(std::string_view completion);

/// Items of a bulleted or numbered list. Continuation lines join the previous
/// item; trailing ';' and '.' are dropped.
std::vector<std::string> parse_list(std::string_view completion);

/// Outcome section of the explain-scenario prompt.
std::string describe_scenario_outcome(const AsmSpecification& spec, const AvallaScenario& scenario);

class Agent {
public:
    /// Throws InvalidArgument when the config is invalid.
    Agent(CompletionBackend& backend, AgentConfig config, PromptLibrary prompts);

    /// `spec_text` is the source shown to the model; defaults to the printed spec.
    ElicitResult elicit_properties(const AsmSpecification& spec, int count, std::string_view spec_text = {});

    FormalizeResult formalize(const AsmSpecification& spec, std::string_view requirement, Logic logic,
                              std::string_view spec_text = {});

    ExplainResult explain_formula(const AsmSpecification& spec, const Formula& formula, Logic logic);

    ExplainResult explain_scenario(const AsmSpecification& spec, const AvallaScenario& scenario,
                                   std::string_view scenario_text = {});

    const AgentConfig& config() const { return config_; }

private:
    std::string ask(AgentTranscript& transcript, const std::string& prompt, int iteration);

    CompletionBackend& backend_;
    AgentConfig config_;
    PromptLibrary prompts_;
};

}  // namespace asmprop
