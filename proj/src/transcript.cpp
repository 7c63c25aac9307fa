#include "asmprop/transcript.hpp"

#include <algorithm>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "asmprop/diagnostics.hpp"
#include "asmprop/syntax.hpp"

namespace asmprop {

const char* to_string(Role role) {
    switch (role) {
        case Role::User: return "user";
        case Role::Agent: return "agent";
        case Role::Checker: return "checker";
    }
    return "?";
}

void AgentTranscript::add(Role role, std::string content, int iteration) {
    if (role == Role::Checker && (entries_.empty() || entries_.back().role != Role::Agent))
        throw Error(ErrorKind::Precondition, "checker entry must follow an agent entry");
    entries_.push_back({role, std::move(content), std::chrono::system_clock::now(), iteration});
}

void AgentTranscript::note(std::string kind, std::string text, int iteration) {
    notes_.push_back({std::move(kind), std::move(text), iteration});
}

std::size_t AgentTranscript::count(Role role) const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.role == role; }));
}

int AgentTranscript::iterations() const {
    int n = 0;
    for (const auto& e : entries_) n = std::max(n, e.iteration);
    return n;
}

bool AgentTranscript::has_note(const std::string& kind) const {
    return std::any_of(notes_.begin(), notes_.end(), [&](const auto& n) { return n.kind == kind; });
}

std::vector<std::string> AgentTranscript::completions() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
        if (e.role == Role::Agent) out.push_back(e.content);
    return out;
}

namespace {

std::string iso8601(std::chrono::system_clock::time_point t) {
    auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t - secs).count();
    std::time_t tt = std::chrono::system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return out.str();
}

nlohmann::json artifact_json(const Artifact& a) {
    if (auto* s = std::get_if<std::string>(&a)) return {{"kind", "text"}, {"value", *s}};
    if (auto* l = std::get_if<std::vector<std::string>>(&a)) return {{"kind", "list"}, {"value", *l}};
    const auto& p = std::get<PropertyDecl>(a);
    return {{"kind", "formula"},
            {"logic", to_string(p.logic)},
            {"value", print_formula(p.formula, FormulaStyle::Uppercase)}};
}

}  // namespace

std::string AgentTranscript::to_jsonl(const std::string& outcome) const {
    std::string out;
    for (const auto& e : entries_) {
        nlohmann::json j = {{"type", "message"},
                            {"task", task_},
                            {"role", to_string(e.role)},
                            {"iteration", e.iteration},
                            {"timestamp", iso8601(e.timestamp)},
                            {"content", e.content}};
        out += j.dump() + "\n";
    }
    for (const auto& n : notes_) {
        nlohmann::json j = {{"type", "note"}, {"kind", n.kind}, {"iteration", n.iteration}, {"text", n.text}};
        out += j.dump() + "\n";
    }
    nlohmann::json result = {{"type", "result"}, {"task", task_}, {"outcome", outcome}, {"iterations", iterations()}};
    if (artifact_) result["artifact"] = artifact_json(*artifact_);
    out += result.dump() + "\n";
    return out;
}

}  // namespace asmprop
