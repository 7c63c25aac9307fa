#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "asmprop/ast.hpp"

namespace asmprop {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;     // e.g. "unknown-symbol"
    std::string message;  // one line, no trailing period
    std::optional<SourcePos> location;
    std::string context;  // extra detail shown to the agent, e.g. the declared names

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

class Diagnostics {
public:
    void error(std::string code, std::string message, SourcePos pos = {},
               std::string context = {});
    void warning(std::string code, std::string message, SourcePos pos = {});
    void append(const Diagnostics& other);

    bool empty() const { return entries_.empty(); }
    bool has_errors() const;
    std::size_t size() const { return entries_.size(); }
    const std::vector<Diagnostic>& entries() const { return entries_; }
    const Diagnostic& front() const { return entries_.front(); }

    /// True if some entry carries the given code.
    bool contains(std::string_view code) const;

    friend bool operator==(const Diagnostics&, const Diagnostics&) = default;

private:
    std::vector<Diagnostic> entries_;
};

enum class Audience { Human, Agent };

/// Agent audience: numbered lines "E1 ...", "W2 ..." in entry order.
/// Human audience: "line:col: error[code]: message" with the source line and a
/// caret underneath when `source` is given.
std::string render_diagnostics(const Diagnostics& diagnostics, Audience audience,
                               std::string_view source = {}, std::string_view file_name = {});

nlohmann::json to_json(const Diagnostics& diagnostics);

/// Either a value or a non-empty error list, never both.
template <class T>
class Result {
public:
    Result(T value) : state_(std::move(value)) {}
    Result(Diagnostics diagnostics) : state_(std::move(diagnostics)) {}

    bool ok() const { return state_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<0>(state_); }
    T& value() & { return std::get<0>(state_); }
    T&& value() && { return std::get<0>(std::move(state_)); }
    const T& operator*() const& { return value(); }
    const T* operator->() const { return &value(); }

    const Diagnostics& diagnostics() const { return std::get<1>(state_); }

private:
    std::variant<T, Diagnostics> state_;
};

/// Runtime failure with a stable machine-readable kind.
enum class ErrorKind {
    InconsistentUpdate,
    DivisionByZero,
    DomainViolation,
    MissingInit,
    SetToControlled,
    SetOutOfDomain,
    UnknownLocation,
    StateLimitExceeded,
    TimeLimitExceeded,
    Cancelled,
    TraceMismatch,
    InvalidArgument,
    Precondition,
    UnsupportedConstruct,
    Io,
    Network,
    HttpStatus,
    FixtureExhausted,
    UnparseableResponse,
    RepairBudgetExhausted,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// Input rejected by the parser or type checker.
class DiagnosticsError : public std::runtime_error {
public:
    explicit DiagnosticsError(Diagnostics diagnostics);

    const Diagnostics& diagnostics() const { return diagnostics_; }

private:
    Diagnostics diagnostics_;
};

}  // namespace asmprop
