#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asmprop/ast.hpp"
#include "asmprop/diagnostics.hpp"

namespace asmprop {

/// Static type of a term. Integer terms carry the domain they were read from
/// when known; all integer domains are mutually compatible.
struct Type {
    enum class Kind { Boolean, Integer, Enumeration } kind = Kind::Boolean;
    std::string domain;

    static Type boolean() { return {Kind::Boolean, "Boolean"}; }
    static Type integer(std::string domain = {}) { return {Kind::Integer, std::move(domain)}; }

    bool compatible_with(const Type& other) const {
        return kind == other.kind && (kind != Kind::Enumeration || domain == other.domain);
    }
    std::string describe() const;
};

/// Typed symbol table of a specification: domains (the builtin Boolean first,
/// then user domains in declaration order), functions in declaration order,
/// enumeration constants and static/derived definitions.
class Signature {
public:
    struct EnumConstant {
        const DomainDecl* domain;
        std::int64_t index;
    };

    const std::vector<DomainDecl>& domains() const { return domains_; }
    const std::vector<FunctionDecl>& functions() const { return functions_; }

    const DomainDecl* domain(std::string_view name) const;
    const FunctionDecl* function(std::string_view name) const;
    std::optional<EnumConstant> enum_constant(std::string_view name) const;
    const FunctionDefinition* definition(std::string_view function) const;

    std::vector<std::string> function_names() const;
    Type type_of_domain(const DomainDecl& d) const;

    /// Canonical spelling of a domain value (`true`, `42`, `RED`).
    std::string format_value(const Value& value, const DomainDecl& domain) const;
    /// The constant term denoting a domain value.
    Term value_term(const Value& value, const DomainDecl& domain) const;

    /// Compact human/LLM-readable listing of domains and functions.
    std::string summary() const;

private:
    friend Result<Signature> extract_signature(const AsmSpecification& spec);

    std::vector<DomainDecl> domains_;
    std::vector<FunctionDecl> functions_;
    std::vector<FunctionDefinition> definitions_;
    std::map<std::string, std::size_t, std::less<>> domain_index_;
    std::map<std::string, std::size_t, std::less<>> function_index_;
    std::map<std::string, std::pair<std::size_t, std::int64_t>, std::less<>> enum_index_;
};

Result<Signature> extract_signature(const AsmSpecification& spec);

/// A formula whose symbols all resolve and whose atoms are Boolean.
struct TypedFormula {
    Formula formula;
    Logic logic = Logic::CTL;
    std::vector<std::string> symbols;  // functions referenced, first-occurrence order
};

Result<TypedFormula> typecheck_formula(const Formula& formula, Logic logic,
                                       const Signature& signature);

/// Type of a term under `variables` (name -> domain) bindings; failures are
/// appended to `out` and yield nullopt.
std::optional<Type> typecheck_term(const Term& term, const Signature& signature,
                                   const std::map<std::string, std::string>& variables,
                                   Diagnostics& out);

/// Checks definitions, rules, init and embedded properties.
Diagnostics typecheck_spec(const AsmSpecification& spec);

/// Closest candidate within edit distance 2, or a candidate that is a prefix
/// of `name` (or has `name` as prefix).
std::optional<std::string> nearest_name(std::string_view name,
                                        const std::vector<std::string>& candidates);

}  // namespace asmprop
