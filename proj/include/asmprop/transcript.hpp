#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "asmprop/ast.hpp"

namespace asmprop {

enum class Role { User, Agent, Checker };

const char* to_string(Role role);

struct TranscriptEntry {
    Role role = Role::User;
    std::string content;
    std::chrono::system_clock::time_point timestamp;
    int iteration = 0;
};

/// Side remarks that are not part of the conversation, e.g. the EARS pattern
/// or a coverage warning.
struct TranscriptNote {
    std::string kind;
    std::string text;
    int iteration = 0;
};

using Artifact = std::variant<std::string, std::vector<std::string>, PropertyDecl>;

class AgentTranscript {
public:
    explicit AgentTranscript(std::string task = {}) : task_(std::move(task)) {}

    /// Throws Precondition for a checker entry that does not follow an agent entry.
    void add(Role role, std::string content, int iteration);
    void note(std::string kind, std::string text, int iteration = 0);
    void set_artifact(Artifact artifact) { artifact_ = std::move(artifact); }

    const std::string& task() const { return task_; }
    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    const std::vector<TranscriptNote>& notes() const { return notes_; }
    const std::optional<Artifact>& artifact() const { return artifact_; }

    std::size_t count(Role role) const;
    int iterations() const;
    bool has_note(const std::string& kind) const;

    /// Agent completions in order, i.e. what a sequence-mode replay needs.
    std::vector<std::string> completions() const;

    /// One JSON object per line: messages, then notes, then a result record.
    std::string to_jsonl(const std::string& outcome = "ok") const;

private:
    std::string task_;
    std::vector<TranscriptEntry> entries_;
    std::vector<TranscriptNote> notes_;
    std::optional<Artifact> artifact_;
};

}  // namespace asmprop
