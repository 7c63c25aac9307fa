#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "asmprop/backend.hpp"
#include "asmprop/checker.hpp"

namespace asmprop::cli {

struct Settings {
    AgentConfig agent;
    std::filesystem::path prompt_dir;
    std::filesystem::path transcripts_dir = "transcripts";
    std::size_t max_states = Limits{}.max_states;
    std::chrono::milliseconds max_time = Limits{}.max_time;
    int ltl_bound = 10;
};

using Getenv = std::function<const char*(const char*)>;

/// `key = value` lines; `#` starts a comment, `[section]` headers are ignored
/// and string values may be quoted. Unknown keys and bad values throw
/// InvalidArgument naming the line.
void apply_config_text(Settings& settings, const std::string& text, const std::string& origin);
void apply_config_file(Settings& settings, const std::filesystem::path& path);

/// ASMPROP_API_URL, ASMPROP_API_KEY, ASMPROP_MODEL, ASMPROP_PROMPT_DIR.
void apply_environment(Settings& settings, const Getenv& getenv);

/// Defaults, then the config file (if present), then the environment.
Settings load_settings(const std::filesystem::path& config_file, bool config_required, const Getenv& getenv);

}  // namespace asmprop::cli
