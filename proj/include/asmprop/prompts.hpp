#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace asmprop {

enum class PromptTask { Elicit, Formalize, ExplainFormula, ExplainScenario, Repair };

const char* to_string(PromptTask task);  // also the template file stem

/// Names a template body may use as `{name}`.
const std::vector<std::string>& allowed_placeholders();

struct PromptTemplate {
    PromptTask task = PromptTask::Elicit;
    std::string body;

    /// Placeholders in order of first occurrence.
    std::vector<std::string> placeholders() const;
    /// Single-pass substitution, so bound values may contain braces. Throws
    /// Precondition when a used placeholder has no binding.
    std::string render(const std::map<std::string, std::string>& bindings) const;
};

class PromptLibrary {
public:
    /// Loads `<task>.txt` for every task. Throws Io for missing files and
    /// InvalidArgument for undeclared placeholders.
    static PromptLibrary load(const std::filesystem::path& directory);
    static PromptLibrary from_templates(std::vector<PromptTemplate> templates);

    const PromptTemplate& get(PromptTask task) const;
    std::string render(PromptTask task, const std::map<std::string, std::string>& bindings) const {
        return get(task).render(bindings);
    }

private:
    std::map<PromptTask, PromptTemplate> templates_;
};

/// ASMPROP_PROMPT_DIR if set, otherwise the directory shipped with the sources.
std::filesystem::path default_prompt_dir();

}  // namespace asmprop
