#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asmprop/ast.hpp"
#include "asmprop/diagnostics.hpp"

namespace asmprop {

struct SmvModel {
    std::string text;
    /// AsmetaL location label ("sec", "seen(RED)") to SMV variable, layout order.
    std::vector<std::pair<std::string, std::string>> var_map;
    std::vector<std::pair<PropertyDecl, std::string>> property_lines;
};

struct SmvOptions {
    /// States explored while looking for reachable inconsistent updates.
    std::size_t prescan_states = 250'000;
};

/// Throws DiagnosticsError for ill-typed specs and Error(UnsupportedConstruct)
/// for name collisions or reachable inconsistent updates.
SmvModel emit_smv(const AsmSpecification& spec, const SmvOptions& options = {});

/// Deterministic SMV identifier for an AsmetaL name.
std::string smv_identifier(const std::string& name);

// ---------------------------------------------------------------------------
// Internal SMV subset: enough to re-read emitted models and run their ASSIGN
// semantics without NuSMV.

struct SmvExpr {
    enum class Kind { Integer, Boolean, Identifier, Unary, Binary, Case, Next, Temporal, Until };
    Kind kind = Kind::Integer;
    std::int64_t number = 0;
    std::string text;  // identifier, operator or temporal operator
    std::vector<SmvExpr> operands;  // Case: guard, value, guard, value, ...
    SourcePos pos;
};

struct SmvVar {
    std::string name;
    enum class Type { Boolean, Range, Enumeration } type = Type::Boolean;
    std::int64_t lo = 0, hi = 0;
    std::vector<std::string> values;
};

struct SmvProgram {
    std::vector<SmvVar> vars;
    std::vector<std::pair<std::string, SmvExpr>> defines;
    std::map<std::string, SmvExpr> init;
    std::map<std::string, SmvExpr> next;
    std::vector<std::pair<std::string, SmvExpr>> specs;  // keyword, formula

    const SmvVar* var(const std::string& name) const;
};

Result<SmvProgram> parse_smv(const std::string& text);

/// Grammar check plus declaration check of every var_map target and every
/// identifier used.
Diagnostics emitted_roundtrip_check(const SmvModel& model);

/// Value of an SMV expression: Booleans and integers use `number`,
/// enumeration constants use `symbol`.
struct SmvValue {
    std::int64_t number = 0;
    std::string symbol;

    friend bool operator==(const SmvValue&, const SmvValue&) = default;
};

using SmvValuation = std::map<std::string, SmvValue>;

/// Evaluates `next(v)` for every assigned variable; unassigned variables keep
/// their value. Monitored (input) variables are left as in `current`.
SmvValuation smv_step(const SmvProgram& program, const SmvValuation& current);
SmvValue smv_evaluate(const SmvProgram& program, const SmvExpr& expr, const SmvValuation& current);

}  // namespace asmprop
