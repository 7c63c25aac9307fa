#pragma once

#include <string>
#include <vector>

#include "asmprop/checker.hpp"
#include "asmprop/interpreter.hpp"

namespace asmprop {

/// Scenario that replays `trace`: monitored values are set before each step
/// (all of them before the first, afterwards only changed ones), every step is
/// followed by a check of the full controlled valuation, and trailing sets make
/// the final monitored values match the trace. Lassos get a loop marker.
/// Throws TraceMismatch when the trace does not replay under the machine.
AvallaScenario trace_to_avalla(const Trace& trace, const Machine& machine, const std::string& scenario_name,
                               const std::string& load_path = {});

/// Same format as trace_to_avalla; a zero-step witness yields a single check.
AvallaScenario witness_to_avalla(const Trace& trace, const Machine& machine, const std::string& scenario_name,
                                 const std::string& load_path = {});

/// Appends the properties not already present (structural equality). Fails
/// without changes if any of them does not type-check.
Result<AsmSpecification> enrich_spec(const AsmSpecification& spec, const std::vector<PropertyDecl>& properties);

}  // namespace asmprop
