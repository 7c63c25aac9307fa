#pragma once

#include <string>
#include <string_view>

#include "asmprop/ast.hpp"
#include "asmprop/diagnostics.hpp"

namespace asmprop {

/// Parses the supported AsmetaL subset. Constructs outside the subset
/// (seq, choose, forall, n-ary functions, ...) are reported by name with the
/// `unsupported-construct` code.
Result<AsmSpecification> parse_asm(std::string_view text);

/// Parses a CTL or LTL property. Call style (`ag(p)`, `au(p, q)`, `g(p)`,
/// `u(p, q)`) is always accepted; with `lenient` the uppercase style
/// (`AG p`, `A[p U q]`, `p U q`) is accepted as well. Operators of the other
/// logic are rejected with `mixed-logic`.
///
/// Lowercase `g f x u` are temporal operators whenever followed by `(`, so
/// unary functions with those names cannot be applied inside properties.
Result<Formula> parse_property(std::string_view text, Logic logic, bool lenient = true);

Result<AvallaScenario> parse_avalla(std::string_view text);

/// A standalone term, e.g. an invariant given on the command line.
Result<Term> parse_term(std::string_view text);

enum class FormulaStyle { Uppercase, CallStyle };

std::string print_term(const Term& term);
std::string print_formula(const Formula& formula, FormulaStyle style);
std::string print_rule(const Rule& rule, int indent = 0);
std::string print_asm(const AsmSpecification& spec);
std::string print_avalla(const AvallaScenario& scenario);

const char* to_string(Logic logic);  // "CTL" / "LTL"

}  // namespace asmprop
