#include "asmprop/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace asmprop {

void Diagnostics::error(std::string code, std::string message, SourcePos pos, std::string context) {
    Diagnostic d;
    d.severity = Severity::Error;
    d.code = std::move(code);
    d.message = std::move(message);
    if (pos.known()) d.location = pos;
    d.context = std::move(context);
    entries_.push_back(std::move(d));
}

void Diagnostics::warning(std::string code, std::string message, SourcePos pos) {
    Diagnostic d;
    d.severity = Severity::Warning;
    d.code = std::move(code);
    d.message = std::move(message);
    if (pos.known()) d.location = pos;
    entries_.push_back(std::move(d));
}

void Diagnostics::append(const Diagnostics& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

bool Diagnostics::has_errors() const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool Diagnostics::contains(std::string_view code) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Diagnostic& d) { return d.code == code; });
}

namespace {

std::string_view source_line(std::string_view source, int line) {
    int current = 1;
    std::size_t start = 0;
    while (current < line) {
        auto nl = source.find('\n', start);
        if (nl == std::string_view::npos) return {};
        start = nl + 1;
        ++current;
    }
    auto end = source.find('\n', start);
    auto text = source.substr(start, end == std::string_view::npos ? source.size() - start
                                                                    : end - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    return text;
}

}  // namespace

std::string render_diagnostics(const Diagnostics& diagnostics, Audience audience,
                               std::string_view source, std::string_view file_name) {
    std::ostringstream out;
    int errors = 0;
    int warnings = 0;
    for (const auto& d : diagnostics.entries()) {
        const bool is_error = d.severity == Severity::Error;
        if (audience == Audience::Agent) {
            out << (is_error ? 'E' : 'W') << (is_error ? ++errors : ++warnings) << ' '
                << d.message;
            if (!d.context.empty()) out << "; " << d.context;
            out << '\n';
            continue;
        }
        if (!file_name.empty()) out << file_name << ':';
        if (d.location) out << d.location->line << ':' << d.location->column << ": ";
        else if (!file_name.empty()) out << ' ';
        out << (is_error ? "error" : "warning") << '[' << d.code << "]: " << d.message << '\n';
        if (!d.context.empty()) out << "  note: " << d.context << '\n';
        if (d.location && !source.empty()) {
            auto text = source_line(source, d.location->line);
            if (!text.empty()) {
                out << "  " << text << '\n'
                    << "  " << std::string(static_cast<std::size_t>(
                                               std::max(0, d.location->column - 1)),
                                           ' ')
                    << "^\n";
            }
        }
    }
    return out.str();
}

nlohmann::json to_json(const Diagnostics& diagnostics) {
    auto arr = nlohmann::json::array();
    for (const auto& d : diagnostics.entries()) {
        nlohmann::json j{{"severity", d.severity == Severity::Error ? "error" : "warning"},
                         {"code", d.code},
                         {"message", d.message}};
        if (d.location) j["span"] = {{"line", d.location->line}, {"column", d.location->column}};
        else j["span"] = nullptr;
        if (!d.context.empty()) j["context"] = d.context;
        arr.push_back(std::move(j));
    }
    return arr;
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InconsistentUpdate: return "inconsistent-update";
        case ErrorKind::DivisionByZero: return "division-by-zero";
        case ErrorKind::DomainViolation: return "domain-violation";
        case ErrorKind::MissingInit: return "missing-init";
        case ErrorKind::SetToControlled: return "set-to-controlled";
        case ErrorKind::SetOutOfDomain: return "set-out-of-domain";
        case ErrorKind::UnknownLocation: return "unknown-location";
        case ErrorKind::StateLimitExceeded: return "state-limit-exceeded";
        case ErrorKind::TimeLimitExceeded: return "time-limit-exceeded";
        case ErrorKind::Cancelled: return "cancelled";
        case ErrorKind::TraceMismatch: return "trace-mismatch";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::UnsupportedConstruct: return "unsupported-construct";
        case ErrorKind::Io: return "io";
        case ErrorKind::Network: return "network";
        case ErrorKind::HttpStatus: return "http-status";
        case ErrorKind::FixtureExhausted: return "fixture-exhausted";
        case ErrorKind::UnparseableResponse: return "unparseable-response";
        case ErrorKind::RepairBudgetExhausted: return "repair-budget-exhausted";
    }
    return "?";
}

namespace {
std::string summarize(const Diagnostics& d) {
    if (d.empty()) return "rejected";
    std::string msg = d.front().message;
    if (d.size() > 1) msg += " (+" + std::to_string(d.size() - 1) + " more)";
    return msg;
}
}  // namespace

DiagnosticsError::DiagnosticsError(Diagnostics diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace asmprop
