#include "config.hpp"

#include <charconv>
#include <cstdlib>

#include "asmprop/diagnostics.hpp"
#include "asmprop/files.hpp"
#include "asmprop/prompts.hpp"

namespace asmprop::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T number(const std::string& value, const std::string& where) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error(ErrorKind::InvalidArgument, where + ": '" + value + "' is not a number");
    return out;
}

bool boolean(const std::string& value, const std::string& where) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw Error(ErrorKind::InvalidArgument, where + ": expected true or false, got '" + value + "'");
}

}  // namespace

void apply_config_text(Settings& s, const std::string& text, const std::string& origin) {
    std::size_t line_no = 0;
    std::size_t at = 0;
    while (at < text.size()) {
        auto nl = text.find('\n', at);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(at, nl - at);
        at = nl + 1;
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);

        bool quoted = false;
        std::string stripped;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            stripped += c;
        }
        stripped = trim(stripped);
        if (stripped.empty() || stripped.front() == '[') continue;

        auto eq = stripped.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, where + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

        if (key == "endpoint") s.agent.endpoint = value;
        else if (key == "model") s.agent.model = value;
        else if (key == "temperature") s.agent.temperature = number<double>(value, where);
        else if (key == "max_iterations") s.agent.max_iterations = number<int>(value, where);
        else if (key == "timeout_seconds") s.agent.timeout = std::chrono::seconds(number<int>(value, where));
        else if (key == "semantic_repair") s.agent.semantic_repair = boolean(value, where);
        else if (key == "backend") {
            if (value == "live") s.agent.backend = BackendKind::Live;
            else if (value == "replay") s.agent.backend = BackendKind::Replay;
            else throw Error(ErrorKind::InvalidArgument, where + ": backend must be live or replay");
        }
        else if (key == "fixtures") s.agent.fixtures = value;
        else if (key == "prompt_dir") s.prompt_dir = value;
        else if (key == "transcripts_dir") s.transcripts_dir = value;
        else if (key == "max_states") s.max_states = number<std::size_t>(value, where);
        else if (key == "max_time_seconds") s.max_time = std::chrono::seconds(number<int>(value, where));
        else if (key == "ltl_bound") s.ltl_bound = number<int>(value, where);
        else throw Error(ErrorKind::InvalidArgument, where + ": unknown key '" + key + "'");
    }
}

void apply_config_file(Settings& settings, const std::filesystem::path& path) {
    apply_config_text(settings, read_text_file(path), path.string());
}

void apply_environment(Settings& s, const Getenv& getenv) {
    auto get = [&](const char* name) -> const char* {
        const char* v = getenv(name);
        return v && *v ? v : nullptr;
    };
    if (auto v = get("ASMPROP_API_URL")) s.agent.endpoint = v;
    if (auto v = get("ASMPROP_API_KEY")) s.agent.api_key = v;
    if (auto v = get("ASMPROP_MODEL")) s.agent.model = v;
    if (auto v = get("ASMPROP_PROMPT_DIR")) s.prompt_dir = v;
}

Settings load_settings(const std::filesystem::path& config_file, bool config_required, const Getenv& getenv) {
    Settings s;
    s.prompt_dir = ASMPROP_DEFAULT_PROMPT_DIR;
    std::error_code ec;
    if (std::filesystem::exists(config_file, ec)) {
        apply_config_file(s, config_file);
    } else if (config_required) {
        throw Error(ErrorKind::Io, "config file '" + config_file.string() + "' not found");
    }
    apply_environment(s, getenv);
    return s;
}

}  // namespace asmprop::cli
